"""Global tolerance plumbing.

All geometric comparisons in the library default to one relative tolerance,
expressed in model units after the cap diameter is normalized to O(1).  The
environment variable CAPUNFOLD_TOL overrides the default of 1e-9.
"""

import os

DEFAULT_TOL = 1e-9


def global_tol() -> float:
    """Return the global tolerance, honoring the CAPUNFOLD_TOL env var."""
    raw = os.environ.get("CAPUNFOLD_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        val = float(raw)
    except ValueError as exc:
        raise ValueError(f"CAPUNFOLD_TOL is not a number: {raw!r}") from exc
    if not val > 0:
        raise ValueError(f"CAPUNFOLD_TOL must be positive, got {val}")
    return val
