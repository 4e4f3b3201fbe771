"""Planar rotation composition and supporting 2D primitives.

Conventions used throughout:

* Points are numpy arrays of shape (2,); polygons are arrays of shape (n, 2)
  listing vertices once (no repeated closing vertex).
* ``Rigid2`` is the orientation-preserving isometry x -> R(theta) x + t with
  theta in radians, counterclockwise positive, normalized to (-pi, pi].
* A rotation sequence is an ordered list of (omega, center) pairs with all
  omega >= 0.  ``compose`` applies the FIRST element of the sequence first.
  This order convention is fixed here and relied on by every caller.

The composite of several small rotations is itself a rotation; its true
center is ``fixed_point(compose(seq))`` and is approximated by the
angle-weighted average of the centers, ``cg_center``.  ``two_rotation_center``
is the closed form for the two-rotation case in the normalized frame
p1 = (0,0), p2 = (1,0) with the p2 rotation applied first:

    c = ( sin(w2/2) cos(w1/2),  sin(w1/2) sin(w2/2) ) / sin((w1+w2)/2)

For w1 = w2 = w this specializes to (1/2, tan(w/2)/2), so the distance from
the midpoint is tan(w/2)/2 ~ (w1+w2)/8, the expected error constant of the
center-of-gravity approximation.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import global_tol

# angle below which a composed motion is treated as a pure translation
THETA_DEGENERATE = 1e-12


class PureTranslationError(ValueError):
    """Composite motion has (numerically) no rotation part, so no center."""


class DegenerateAnglesError(ValueError):
    """Angle pair outside the range where the closed-form center exists."""


class NonSimplePolygonError(ValueError):
    """Polygon is degenerate or self-intersecting."""


def _norm_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    out = (theta + np.pi) % (2.0 * np.pi) - np.pi
    if out == -np.pi:
        out = np.pi
    return float(out)


def _rot_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Rigid2:
    """Orientation-preserving planar isometry x -> R(theta) x + t."""

    theta: float
    t: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "theta", _norm_angle(self.theta))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(2))

    @staticmethod
    def identity() -> "Rigid2":
        return Rigid2(0.0, np.zeros(2))

    def apply(self, pts):
        """Apply to a point (2,) or an array of points (n, 2)."""
        pts = np.asarray(pts, dtype=float)
        return pts @ _rot_matrix(self.theta).T + self.t

    def then(self, other: "Rigid2") -> "Rigid2":
        """The motion doing self first, then other."""
        t = _rot_matrix(other.theta) @ self.t + other.t
        return Rigid2(self.theta + other.theta, t)

    def inverse(self) -> "Rigid2":
        return Rigid2(-self.theta, -(_rot_matrix(-self.theta) @ self.t))

    def matrix(self) -> np.ndarray:
        """3x3 homogeneous matrix of the motion."""
        m = np.eye(3)
        m[:2, :2] = _rot_matrix(self.theta)
        m[:2, 2] = self.t
        return m


def rotation_about(omega: float, center) -> Rigid2:
    """Rotation by omega (counterclockwise, radians) about a fixed center."""
    center = np.asarray(center, dtype=float).reshape(2)
    r = _rot_matrix(omega)
    return Rigid2(omega, center - r @ center)


def compose(seq) -> Rigid2:
    """Compose a rotation sequence; the first element is applied first.

    seq is an iterable of (omega, center) pairs.
    """
    items = list(seq)
    if not items:
        raise ValueError("cannot compose an empty rotation sequence")
    out = rotation_about(*items[0])
    for omega, center in items[1:]:
        out = out.then(rotation_about(omega, center))
    return out


def fixed_point(m: Rigid2, theta_min: float = THETA_DEGENERATE) -> np.ndarray:
    """The unique fixed point of a motion with a genuine rotation part.

    Solves (I - R(theta)) x = t in the closed form

        x = 1/(2 sin(theta/2)) * [[sin(theta/2), -cos(theta/2)],
                                  [cos(theta/2),  sin(theta/2)]] @ t

    which stays accurate as theta -> 0, where the center runs off to
    infinity.  Raises PureTranslationError below the theta_min threshold.
    """
    if abs(m.theta) < theta_min:
        raise PureTranslationError(
            f"motion with |theta| = {abs(m.theta):.3e} has no usable center"
        )
    h = 0.5 * m.theta
    sh, ch = np.sin(h), np.cos(h)
    inv = np.array([[sh, -ch], [ch, sh]]) / (2.0 * sh)
    return inv @ m.t


def two_rotation_center(omega1: float, omega2: float) -> np.ndarray:
    """Closed-form composite center for two rotations in the normalized frame.

    Frame: first rotation center p1 = (0, 0) with angle omega1, second center
    p2 = (1, 0) with angle omega2, and the rotation ABOUT p2 IS APPLIED FIRST
    (the deeper center acts first, matching how cut paths are composed).
    Equals fixed_point(compose([(omega2, p2), (omega1, p1)])).
    """
    s = np.sin(0.5 * (omega1 + omega2))
    if abs(s) < THETA_DEGENERATE:
        raise DegenerateAnglesError(
            f"omega1 + omega2 = {omega1 + omega2!r} admits no rotation center"
        )
    return np.array(
        [
            np.sin(0.5 * omega2) * np.cos(0.5 * omega1) / s,
            np.sin(0.5 * omega1) * np.sin(0.5 * omega2) / s,
        ]
    )


def cg_center(seq) -> np.ndarray:
    """Angle-weighted average of the rotation centers.

    This is the small-angle approximation of the true composite center; as a
    convex combination it always lies in the convex hull of the centers.
    """
    items = list(seq)
    omegas = np.array([float(om) for om, _ in items])
    centers = np.array([np.asarray(p, dtype=float) for _, p in items])
    total = omegas.sum()
    if not total > 0.0:
        raise ValueError("cg_center needs a positive total angle")
    return (omegas[:, None] * centers).sum(axis=0) / total


def cg_error_bound(seq) -> float:
    """Per-link error estimate 1/2 * sum_i |p_{i+1} - p_i| * omega_i.

    Index convention: link i joins centers i and i+1 and is weighted by
    omega_i, for i = 1..k-1, so the final angle omega_k is unweighted.

    This estimate is tight for short chains but is NOT a guaranteed bound:
    for near-straight chains of k comparable angles the true error grows
    like k/6 of this value (see cg_error_bound_crude for a guaranteed one).
    It is kept in this form because the per-link pairing is what downstream
    safety margins are calibrated against.
    """
    items = list(seq)
    if len(items) < 2:
        raise ValueError("cg_error_bound needs at least 2 rotations")
    centers = np.array([np.asarray(p, dtype=float) for _, p in items])
    omegas = np.array([float(om) for om, _ in items])
    links = np.linalg.norm(np.diff(centers, axis=0), axis=1)
    return float(0.5 * (links * omegas[:-1]).sum())


def cg_error_bound_crude(seq) -> float:
    """Guaranteed error bound 1/2 * (chain length) * (total angle).

    The exact second-order error is |sum_m e_m b_m s_m| / (2 W) where e_m is
    link vector m, b_m / s_m are the angle sums before / after the link and
    W the total angle.  Since b_m s_m <= W^2 / 4 this is at most L W / 8, so
    L W / 2 bounds the true error with a 4x margin for small angles.
    """
    items = list(seq)
    if len(items) < 2:
        raise ValueError("cg_error_bound_crude needs at least 2 rotations")
    centers = np.array([np.asarray(p, dtype=float) for _, p in items])
    omegas = np.array([float(om) for om, _ in items])
    length = np.linalg.norm(np.diff(centers, axis=0), axis=1).sum()
    return float(0.5 * length * omegas.sum())


# ---------------------------------------------------------------------------
# hulls, segments, polygons
# ---------------------------------------------------------------------------


def orient(a, b, c) -> float:
    """Twice the signed area of triangle (a, b, c); > 0 for a left turn."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def convex_hull_2d(points) -> np.ndarray:
    """Convex hull by monotone chain; counterclockwise vertex order.

    Collinear interior points are dropped; fully collinear input yields the
    degenerate 2-vertex hull of the extreme pair, a single input point yields
    a 1-vertex hull.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex_hull_2d needs at least one point")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.diff(pts, axis=0) != 0.0, axis=1)
    pts = pts[keep]
    if len(pts) == 1:
        return pts.copy()

    def half(chain_pts):
        out = []
        for p in chain_pts:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 2:  # all points collinear, keep the extreme pair
        hull = np.array([pts[0], pts[-1]])
    return hull


def segments_properly_cross(p1, p2, q1, q2) -> bool:
    """True iff open segments (p1,p2) and (q1,q2) cross transversally.

    Orientation signs that are pure rounding noise (collinear or shared-line
    configurations) do not count; each side test must clear a scale-relative
    threshold with opposite signs.
    """
    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    span = max(
        float(np.max(np.abs(np.asarray((p1, p2, q1, q2), dtype=float)))), 1.0
    )
    eps = 1e-12 * span * span
    opp12 = (d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)
    opp34 = (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    return opp12 and opp34


def _ring_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _clean_ring(poly) -> np.ndarray:
    """Validate a simple polygon; returns it without a closing duplicate."""
    pts = np.asarray(poly, dtype=float).reshape(-1, 2)
    if len(pts) >= 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) < 3:
        raise NonSimplePolygonError("polygon needs at least 3 distinct vertices")
    if not np.all(np.isfinite(pts)):
        raise NonSimplePolygonError("polygon has non-finite coordinates")
    edges = np.roll(pts, -1, axis=0) - pts
    if np.any(np.all(edges == 0.0, axis=1)):
        raise NonSimplePolygonError("polygon has a zero-length edge")
    if _ring_area(pts) == 0.0:
        raise NonSimplePolygonError("polygon has zero area")
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share an endpoint
            if segments_properly_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                raise NonSimplePolygonError(f"edges {i} and {j} cross")
    return pts


def _is_convex(poly: np.ndarray) -> bool:
    n = len(poly)
    sign = 0.0
    for i in range(n):
        cr = orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n])
        if cr != 0.0:
            if sign != 0.0 and (cr > 0) != (sign > 0):
                return False
            sign = cr
    return True


def _ear_clip(poly: np.ndarray):
    """Triangulate a simple polygon into convex pieces (triangles)."""
    pts = poly if _ring_area(poly) > 0 else poly[::-1]
    idx = list(range(len(pts)))
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 4 * len(poly) ** 2:
        guard += 1
        n = len(idx)
        for k in range(n):
            a, b, c = idx[(k - 1) % n], idx[k], idx[(k + 1) % n]
            if orient(pts[a], pts[b], pts[c]) <= 0.0:
                continue  # reflex corner, not an ear
            ear_ok = True
            for other in idx:
                if other in (a, b, c):
                    continue
                p = pts[other]
                if (
                    orient(pts[a], pts[b], p) > 0
                    and orient(pts[b], pts[c], p) > 0
                    and orient(pts[c], pts[a], p) > 0
                ):
                    ear_ok = False
                    break
            if ear_ok:
                tris.append(np.array([pts[a], pts[b], pts[c]]))
                idx.pop(k)
                break
        else:
            break  # no strict ear found, bail out with what we have
    tris.append(np.array([pts[i] for i in idx]))
    return tris


def _sat_depth(a: np.ndarray, b: np.ndarray) -> float:
    """Interpenetration depth of two convex polygons (<= 0 when separated).

    Classic separating-axis computation: over the edge normals of both
    polygons, the smallest overlap of the projection intervals.  For
    overlapping polygons this is the minimal translation distance.
    """
    depth = np.inf
    for poly in (a, b):
        edges = np.roll(poly, -1, axis=0) - poly
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        lengths = np.linalg.norm(normals, axis=1)
        ok = lengths > 0.0
        normals = normals[ok] / lengths[ok, None]
        pa = a @ normals.T
        pb = b @ normals.T
        ext = np.minimum(pa.max(axis=0), pb.max(axis=0)) - np.maximum(
            pa.min(axis=0), pb.min(axis=0)
        )
        depth = min(depth, float(ext.min()))
        if depth <= 0.0:
            return depth
    return depth


def polygons_overlap(a, b, tol: float = None) -> bool:
    """True iff the interiors of two simple polygons genuinely intersect.

    Shared boundary does not count: interpenetration depth at or below tol
    (default the global tolerance, in model units) is treated as touching.
    Non-convex inputs are ear-clipped and tested piecewise.
    """
    if tol is None:
        tol = global_tol()
    ra = _clean_ring(a)
    rb = _clean_ring(b)
    parts_a = [ra] if _is_convex(ra) else _ear_clip(ra)
    parts_b = [rb] if _is_convex(rb) else _ear_clip(rb)
    for pa in parts_a:
        for pb in parts_b:
            if _sat_depth(pa, pb) > tol:
                return True
    return False


def reflect_points(pts, line_a, line_b) -> np.ndarray:
    """Reflect points across the line through line_a and line_b.

    Orientation-reversing, so the result is deliberately not a Rigid2.
    """
    pts = np.asarray(pts, dtype=float)
    a = np.asarray(line_a, dtype=float)
    d = np.asarray(line_b, dtype=float) - a
    nrm = np.linalg.norm(d)
    if nrm == 0.0:
        raise ValueError("reflection line is degenerate")
    d = d / nrm
    rel = pts - a
    along = rel @ d
    perp = rel - np.outer(along, d) if pts.ndim == 2 else rel - along * d
    return pts - 2.0 * perp
