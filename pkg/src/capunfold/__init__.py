"""capunfold: edge-unfolding of nearly flat, acutely triangulated convex caps.

The library takes a triangulated convex cap (a convex surface patch with a
planar convex boundary), grows a boundary-rooted cut forest whose paths are
angle-monotone inside four slanted quadrants, develops the cut surface into
the plane, and attaches the polygonal base across a safe boundary edge so the
whole polyhedron unfolds to a non-overlapping net.

Modules:
    geom    planar isometries, rotation composition, hulls, overlap tests
    cap     cap data model, validation, projection, curvature
    capgen  seeded cap generator and the adversarial 2D scene
    forest  quadrant frames and angle-monotone cut forests
    unfold  isometric development, gap segments, composite centers
    base    safe-edge tests and base attachment
    io      OFF reading, SVG / JSON emission, command line interface
"""

from . import base, cap, capgen, forest, geom, io, unfold
from .base import FullNet, NoSafeEdgeError, run_pipeline, unfold_polyhedron
from .cap import Cap, validate_cap
from .config import global_tol

__version__ = "0.1.0"

__all__ = [
    "Cap",
    "FullNet",
    "NoSafeEdgeError",
    "base",
    "cap",
    "capgen",
    "forest",
    "geom",
    "global_tol",
    "io",
    "run_pipeline",
    "unfold",
    "unfold_polyhedron",
    "validate_cap",
    "__version__",
]
