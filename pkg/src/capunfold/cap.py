"""Convex cap data model: validation, projection, and curvature.

A cap is a triangulated convex surface patch whose boundary is a planar
convex polygon in the z = 0 plane and whose interior vertices sit at z >= 0
(z = 0 throughout gives the degenerate flat cap, allowed as the
zero-curvature limit).  Triangles are oriented counterclockwise seen from
above, i.e. with upward normals.

Validation computes the metrics the unfolding pipeline consumes:

    phi_max      largest angle any face normal makes with the z axis
    omega        per internal vertex, 2*pi minus the incident face angles
    omega_total  sum of the above
    delta_theta  smallest quadrant slant compatible with phi_max, i.e.
                 (phi_max / 0.3)^2, from the hypothesis phi <= 0.3 sqrt(slant)
"""

from dataclasses import dataclass, field

import numpy as np

from .config import global_tol
from . import geom


class CapValidationError(ValueError):
    """Base class for cap validation failures."""


class NonPlanarBoundaryError(CapValidationError):
    pass


class NonConvexBoundaryError(CapValidationError):
    pass


class NonAcuteTriangleError(CapValidationError):
    pass


class NegativeCurvatureError(CapValidationError):
    pass


class NonManifoldEdgeError(CapValidationError):
    pass


class InternalVertexHeightError(CapValidationError):
    pass


class TriangleOrientationError(CapValidationError):
    pass


class CrossingEdgesError(CapValidationError):
    """Projected edges cross: the input is not a valid cap."""


ACUTE_MARGIN = 1e-6  # required gap below pi/2, radians


@dataclass
class Cap:
    """Triangulated cap: 3D vertices, CCW triangles, cyclic boundary."""

    vertices: np.ndarray  # (n, 3)
    triangles: np.ndarray  # (m, 3) int
    boundary: np.ndarray  # (k,) int, cyclic

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.boundary = np.asarray(self.boundary, dtype=np.int64).reshape(-1)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def internal_vertices(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary] = False
        return np.flatnonzero(mask)

    def diameter(self) -> float:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))


@dataclass
class CapMetrics:
    phi_max: float
    omega: dict  # internal vertex id -> curvature (radians)
    omega_total: float
    delta_theta: float


@dataclass
class ProjectionGraph:
    """Planar straight-line image of the cap (z dropped)."""

    positions: np.ndarray  # (n, 2)
    edges: np.ndarray  # (E, 2) int, each row sorted
    boundary: np.ndarray  # cyclic vertex ids
    internal: np.ndarray  # sorted internal vertex ids
    adjacency: dict  # vertex id -> sorted neighbor id array
    non_acute_faces: list = field(default_factory=list)
    max_face_angle: float = 0.0  # largest projected triangle angle


def edge_face_map(cap: Cap) -> dict:
    """Map each undirected edge (i, j), i < j, to the faces using it."""
    out = {}
    for f, (a, b, c) in enumerate(cap.triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (int(min(u, v)), int(max(u, v)))
            out.setdefault(key, []).append(f)
    return out


def triangle_angles(pts: np.ndarray) -> np.ndarray:
    """Interior angles of a triangle given its 3 corner points (any dim)."""
    out = np.empty(3)
    for i in range(3):
        u = pts[(i + 1) % 3] - pts[i]
        v = pts[(i + 2) % 3] - pts[i]
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0.0 or nv == 0.0:
            raise CapValidationError("degenerate triangle with a zero-length side")
        out[i] = np.arccos(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))
    return out


def _boundary_edge_set(boundary: np.ndarray) -> set:
    k = len(boundary)
    return {
        (int(min(boundary[i], boundary[(i + 1) % k])), int(max(boundary[i], boundary[(i + 1) % k])))
        for i in range(k)
    }


def _check_structure(cap: Cap):
    n = cap.n_vertices
    if len(cap.boundary) < 3:
        raise CapValidationError("boundary needs at least 3 vertices")
    if len(set(cap.boundary.tolist())) != len(cap.boundary):
        raise CapValidationError("boundary repeats a vertex")
    if cap.triangles.size and (cap.triangles.min() < 0 or cap.triangles.max() >= n):
        raise CapValidationError("triangle index out of range")
    if cap.boundary.min() < 0 or cap.boundary.max() >= n:
        raise CapValidationError("boundary index out of range")
    for f, tri in enumerate(cap.triangles):
        if len(set(tri.tolist())) != 3:
            raise CapValidationError(f"triangle {f} repeats a vertex")


def _check_manifold(cap: Cap):
    efm = edge_face_map(cap)
    boundary_edges = _boundary_edge_set(cap.boundary)
    for edge, faces in efm.items():
        if edge in boundary_edges:
            if len(faces) != 1:
                raise NonManifoldEdgeError(
                    f"boundary edge {edge} borders {len(faces)} faces, expected 1"
                )
        elif len(faces) != 2:
            raise NonManifoldEdgeError(
                f"internal edge {edge} borders {len(faces)} faces, expected 2"
            )
    for edge in boundary_edges:
        if edge not in efm:
            raise NonManifoldEdgeError(f"boundary edge {edge} is not in any triangle")
    referenced = set()
    for tri in cap.triangles:
        referenced.update(int(v) for v in tri)
    missing = set(range(cap.n_vertices)) - referenced
    if missing:
        raise CapValidationError(f"vertices {sorted(missing)} belong to no triangle")


def _check_heights(cap: Cap, tol: float):
    scale = max(cap.diameter(), 1e-300)
    z = cap.vertices[:, 2]
    zb = z[cap.boundary]
    if np.max(np.abs(zb)) > tol * scale:
        worst = int(cap.boundary[np.argmax(np.abs(zb))])
        raise NonPlanarBoundaryError(
            f"boundary vertex {worst} at z = {z[worst]:.3e}, expected z = 0"
        )
    internal = cap.internal_vertices()
    if internal.size:
        zi = z[internal]
        if zi.min() < -tol * scale:
            worst = int(internal[np.argmin(zi)])
            raise InternalVertexHeightError(
                f"internal vertex {worst} at z = {z[worst]:.3e}, below the base plane"
            )


def _check_boundary_convex(cap: Cap, tol: float):
    pts = cap.vertices[cap.boundary][:, :2]
    k = len(pts)
    area2 = sum(geom.orient((0.0, 0.0), pts[i], pts[(i + 1) % k]) for i in range(k))
    if area2 <= 0:
        raise NonConvexBoundaryError("boundary cycle is clockwise or degenerate")
    scale2 = max(cap.diameter(), 1e-300) ** 2
    for i in range(k):
        turn = geom.orient(pts[i], pts[(i + 1) % k], pts[(i + 2) % k])
        if turn < -tol * scale2:
            raise NonConvexBoundaryError(
                f"boundary turns right at vertex {int(cap.boundary[(i + 1) % k])}"
            )
    try:
        geom._clean_ring(pts)
    except geom.NonSimplePolygonError as exc:
        raise NonConvexBoundaryError(f"boundary polygon is not simple: {exc}") from exc


def _check_orientation(cap: Cap):
    for f, tri in enumerate(cap.triangles):
        p = cap.vertices[tri]
        if geom.orient(p[0, :2], p[1, :2], p[2, :2]) <= 0.0:
            raise TriangleOrientationError(
                f"triangle {f} is not counterclockwise seen from above"
            )


def _check_acute(cap: Cap):
    worst_face, worst_angle = -1, -1.0
    for f, tri in enumerate(cap.triangles):
        ang = triangle_angles(cap.vertices[tri]).max()
        if ang > worst_angle:
            worst_face, worst_angle = f, ang
    if worst_face >= 0 and worst_angle >= np.pi / 2 - ACUTE_MARGIN:
        raise NonAcuteTriangleError(
            f"triangle {worst_face} has max angle {np.degrees(worst_angle):.6f} deg, "
            f"must be acute"
        )


def _face_normal_angles(cap: Cap) -> np.ndarray:
    p = cap.vertices[cap.triangles]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    norms = np.linalg.norm(n, axis=1)
    return np.arccos(np.clip(n[:, 2] / norms, -1.0, 1.0))


def _curvatures(cap: Cap, tol: float) -> dict:
    angle_sum = np.zeros(cap.n_vertices)
    for tri in cap.triangles:
        ang = triangle_angles(cap.vertices[tri])
        for corner, v in enumerate(tri):
            angle_sum[v] += ang[corner]
    omega = {}
    for v in cap.internal_vertices():
        w = 2.0 * np.pi - angle_sum[v]
        if w < -tol:
            raise NegativeCurvatureError(
                f"internal vertex {int(v)} has curvature {w:.3e} < 0, cap is not convex"
            )
        omega[int(v)] = max(w, 0.0)
    return omega


def _check_planar_embedding(positions: np.ndarray, edges: np.ndarray, tol: float):
    """O(E^2) pairwise segment crossing check plus vertex-on-edge test."""
    if len(edges) == 0:
        return
    a = positions[edges[:, 0]]
    b = positions[edges[:, 1]]

    def cross(o, p, q):
        return (p[..., 0] - o[..., 0]) * (q[..., 1] - o[..., 1]) - (
            p[..., 1] - o[..., 1]
        ) * (q[..., 0] - o[..., 0])

    e = len(edges)
    ai, bi = a[:, None, :], b[:, None, :]
    aj, bj = a[None, :, :], b[None, :, :]
    d1 = cross(aj, bj, ai)
    d2 = cross(aj, bj, bi)
    d3 = cross(ai, bi, aj)
    d4 = cross(ai, bi, bj)
    # collinear pairs produce cross products at rounding-noise scale with
    # arbitrary signs; require clear sign opposition, not raw sign bits
    eps = 1e-12 * max(float(np.abs(positions).max()), 1.0) ** 2
    opp12 = ((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))
    opp34 = ((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps))
    proper = opp12 & opp34
    shares = (
        (edges[:, None, 0] == edges[None, :, 0])
        | (edges[:, None, 0] == edges[None, :, 1])
        | (edges[:, None, 1] == edges[None, :, 0])
        | (edges[:, None, 1] == edges[None, :, 1])
    )
    proper &= ~shares
    proper[np.tril_indices(e)] = False
    if proper.any():
        i, j = np.argwhere(proper)[0]
        raise CrossingEdgesError(
            f"projected edges {tuple(edges[i])} and {tuple(edges[j])} cross"
        )
    # vertices strictly inside another edge signal T-junctions / collinear overlap
    seg = b - a
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    for v, p in enumerate(positions):
        rel = p - a
        t = np.einsum("ij,ij->i", rel, seg) / np.maximum(seg_len2, 1e-300)
        on = (t > 1e-9) & (t < 1 - 1e-9)
        if not on.any():
            continue
        close = np.abs(rel[:, 0] * seg[:, 1] - rel[:, 1] * seg[:, 0]) < tol * np.sqrt(
            np.maximum(seg_len2, 1e-300)
        )
        hit = on & close & (edges[:, 0] != v) & (edges[:, 1] != v)
        if hit.any():
            j = int(np.flatnonzero(hit)[0])
            raise CrossingEdgesError(
                f"vertex {v} lies in the interior of projected edge {tuple(edges[j])}"
            )


def validate_cap(cap: Cap, tol: float = None) -> CapMetrics:
    """Check every cap invariant and return the curvature metrics.

    Raises a distinct CapValidationError subclass per failure mode.  The
    tolerance is relative to the cap diameter; default is the global one.
    """
    if tol is None:
        tol = global_tol()
    _check_structure(cap)
    _check_manifold(cap)
    _check_heights(cap, tol)
    _check_boundary_convex(cap, tol)
    _check_orientation(cap)
    omega = _curvatures(cap, tol)
    _check_acute(cap)
    phi_max = float(_face_normal_angles(cap).max()) if len(cap.triangles) else 0.0
    edges = np.array(sorted(edge_face_map(cap).keys()), dtype=np.int64).reshape(-1, 2)
    _check_planar_embedding(cap.vertices[:, :2], edges, tol)
    omega_total = float(sum(omega.values()))
    delta_theta = (phi_max / 0.3) ** 2
    return CapMetrics(
        phi_max=phi_max,
        omega=omega,
        omega_total=omega_total,
        delta_theta=delta_theta,
    )


def project(cap: Cap, tol: float = None) -> ProjectionGraph:
    """Drop z, keep the edge set, and verify the planar embedding.

    Also measures projected triangle angles: the forest step rule needs them
    all comfortably acute, so faces that project to a non-acute triangle are
    reported on the graph rather than silently accepted.
    """
    if tol is None:
        tol = global_tol()
    positions = cap.vertices[:, :2].copy()
    edges = np.array(sorted(edge_face_map(cap).keys()), dtype=np.int64).reshape(-1, 2)
    _check_planar_embedding(positions, edges, tol)
    adjacency = {}
    for u, v in edges:
        adjacency.setdefault(int(u), []).append(int(v))
        adjacency.setdefault(int(v), []).append(int(u))
    adjacency = {v: np.array(sorted(nbrs), dtype=np.int64) for v, nbrs in adjacency.items()}
    non_acute = []
    max_angle = 0.0
    for f, tri in enumerate(cap.triangles):
        ang = float(triangle_angles(positions[tri]).max())
        max_angle = max(max_angle, ang)
        if ang >= np.pi / 2 - ACUTE_MARGIN:
            non_acute.append(f)
    return ProjectionGraph(
        positions=positions,
        edges=edges,
        boundary=cap.boundary.copy(),
        internal=cap.internal_vertices(),
        adjacency=adjacency,
        non_acute_faces=non_acute,
        max_face_angle=max_angle,
    )


@dataclass
class BoundsReport:
    """Advisory verdicts on the small-curvature hypotheses."""

    omega_total: float
    phi_max: float
    delta_theta: float
    omega_bound: float  # pi * phi_max^2
    omega_ok: bool  # omega_total < pi * phi_max^2
    phi_bound: float  # 0.3 * sqrt(delta_theta)
    phi_ok: bool  # phi_max <= 0.3 sqrt(delta_theta)
    tree_bound: float  # 2 * delta_theta
    tree_ok: bool  # omega_total (>= any tree's sum) <= 2 delta_theta

    def all_ok(self) -> bool:
        return self.omega_ok and self.phi_ok and self.tree_ok


def curvature_bounds_check(metrics: CapMetrics, delta_theta: float = None) -> BoundsReport:
    """Report the three smallness conditions the safe-edge argument needs.

    delta_theta defaults to the metrics' own minimal supported slant; pass
    the actual quadrant slant in use to check against it.  The per-tree
    curvature condition is checked against omega_total, which bounds any
    single tree's sum from above.
    """
    dt = metrics.delta_theta if delta_theta is None else float(delta_theta)
    omega_bound = np.pi * metrics.phi_max**2
    phi_bound = 0.3 * np.sqrt(dt)
    tree_bound = 2.0 * dt
    # numerically flat caps satisfy the strict bound vacuously
    flat = metrics.omega_total <= 1e-12
    return BoundsReport(
        omega_total=metrics.omega_total,
        phi_max=metrics.phi_max,
        delta_theta=dt,
        omega_bound=float(omega_bound),
        omega_ok=bool(flat or metrics.omega_total < omega_bound),
        phi_bound=float(phi_bound),
        phi_ok=bool(metrics.phi_max <= phi_bound * (1 + 1e-12) + 1e-15),
        tree_bound=float(tree_bound),
        tree_ok=bool(metrics.omega_total <= tree_bound * (1 + 1e-12) + 1e-15),
    )
