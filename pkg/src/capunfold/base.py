"""Safe-edge detection and base attachment for the full-polyhedron net.

After the cut cap is developed, the convex base polygon can be reflected
("flipped out") across one boundary edge e to complete the net.  An edge is
usable when nothing in the developed cap reaches below it:

* locally safe: in the frame where the developed e lies horizontal with the
  cap's material above, the composite rotation center of each tree rooted at
  an endpoint of e lies strictly below the line of e.  Roots carrying zero
  curvature have no rotation and count as safe.
* globally safe: two further checks, both required.  (a) every opened gap
  segment lies weakly below the line of e: both endpoints v and v_prime have
  non-positive elevation along e's outward normal; (b) the reflected base
  polygon overlaps no developed cap face.  (a) is the cheap criterion -- the
  reflected base stays inside the closed half-plane below e, so nothing below
  the line can reach it; (b) is ground truth.  They can disagree at finite
  curvature, so both verdicts are reported.

The full pipeline (validate, project, orient, grow, develop, scan, attach)
lives in run_pipeline / unfold_polyhedron.
"""

import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import forest as forest_mod
from . import geom, unfold
from .cap import Cap, curvature_bounds_check, edge_face_map, project, validate_cap
from .config import global_tol

# centers or chords within this of the edge line (scale-relative) are unsafe
STRICT_BELOW = 1e-12


class UnsafeEdgeError(RuntimeError):
    """Final overlap verification failed for an edge believed safe."""


class NoSafeEdgeError(RuntimeError):
    """No boundary edge passed the safety scan; carries all edge reports."""

    def __init__(self, message, reports=()):
        super().__init__(message)
        self.reports = list(reports)


@dataclass
class SafeEdgeReport:
    edge: tuple  # boundary edge (u, v), ids ascending
    locally_safe: bool
    globally_safe: bool
    centers: tuple  # composite center per endpoint, None when no curved tree
    witness: object = None  # offending ("center", v), ("gap", root), ("overlap", face)
    gap_criterion: bool = None  # verdict of check (a), None if not evaluated
    overlap_criterion: bool = None  # verdict of check (b), None if not evaluated


@dataclass
class FullNet:
    cap_net: unfold.Development
    base_polygon: np.ndarray  # reflected base, congruent to the 3D base
    attach_edge: tuple


def _edge_frame(dev, cap: Cap, edge):
    """Developed endpoints of a boundary edge and its outward unit normal."""
    e = (int(min(edge)), int(max(edge)))
    faces = edge_face_map(cap).get(e)
    if faces is None or len(faces) != 1:
        raise ValueError(f"{e} is not a boundary edge of the cap")
    f = faces[0]
    tri = [int(x) for x in cap.triangles[f]]
    pts = dev.face_points[f]
    ia, ib = tri.index(e[0]), tri.index(e[1])
    a, b = pts[ia], pts[ib]
    third = pts[3 - ia - ib]
    t = b - a
    t = t / np.linalg.norm(t)
    n = np.array([-t[1], t[0]])
    if np.dot(third - a, n) > 0.0:  # material must sit on the inward side
        n = -n
    return a, b, n, f


def _net_scale(dev) -> float:
    if len(dev.boundary_polyline) == 0:
        return 1.0
    return max(float(np.abs(dev.boundary_polyline).max()), 1.0)


def root_centers(cap: Cap, forest, dev, metrics=None) -> dict:
    """Composite rotation center per curved root; flat trees map to None.

    Centers depend only on the development, not on any candidate edge, so a
    safety scan computes them once and hands them to locally_safe.
    """
    if metrics is None:
        metrics = validate_cap(cap)
    omega = metrics.omega
    out = {}
    for root in forest.roots:
        total = sum(omega[w] for w in forest.tree_vertices(root))
        if total <= geom.THETA_DEGENERATE:
            out[root] = None
        else:
            out[root] = unfold.composite_center(
                cap, forest, root, dev=dev, metrics=metrics
            ).center
    return out


def locally_safe(dev, cap: Cap, forest, edge, centers: dict = None) -> SafeEdgeReport:
    """Local safety of one boundary edge: incident centers strictly below.

    centers may carry a precomputed root_centers map to avoid recomputing
    the per-root composite rotations for every scanned edge.
    """
    a, b, n, _ = _edge_frame(dev, cap, edge)
    e = (int(min(edge)), int(max(edge)))
    if centers is None:
        centers = root_centers(cap, forest, dev)
    scale = _net_scale(dev)
    ok = True
    witness = None
    pair = []
    for w in e:
        c = centers.get(w)
        pair.append(c)
        if c is None:
            continue  # no tree, or a tree of zero curvature: nothing rotates
        if np.dot(c - a, n) >= -STRICT_BELOW * scale:
            ok = False
            if witness is None:
                witness = ("center", w)
    return SafeEdgeReport(
        edge=e,
        locally_safe=ok,
        globally_safe=False,
        centers=tuple(pair),
        witness=witness,
    )


def base_reflected(dev, cap: Cap, edge) -> np.ndarray:
    """The base polygon developed by reflection across one boundary edge.

    The base is congruent to the cap's boundary polygon at height zero; it
    is carried into the net frame by the rigid motion pinning the shared
    edge, then mirrored across that edge to fold it outward.
    """
    a, b, _, _ = _edge_frame(dev, cap, edge)
    e = (int(min(edge)), int(max(edge)))
    boundary = [int(v) for v in cap.boundary]
    base = cap.vertices[boundary][:, :2]
    iu = boundary.index(e[0])
    m = unfold._rigid_from_edge(base[iu], base[boundary.index(e[1])], a, b)
    placed = m.apply(base)
    return geom.reflect_points(placed, a, b)[::-1]  # keep counterclockwise


def globally_safe(dev, cap: Cap, forest, edge, centers: dict = None,
                  tol: float = None) -> SafeEdgeReport:
    """Full safety verdict for one boundary edge (local + (a) + (b))."""
    if tol is None:
        tol = global_tol()
    rep = locally_safe(dev, cap, forest, edge, centers=centers)
    a, b, n, _ = _edge_frame(dev, cap, edge)
    scale = _net_scale(dev)

    gap_ok = True
    witness = rep.witness
    for root in sorted(dev.gap_segments):
        v, v_prime = dev.gap_segments[root]
        if np.linalg.norm(v_prime - v) <= tol * scale:
            continue  # null gap: nothing opened
        # both endpoints must sit weakly below the line of e
        elev = max(float(np.dot(v - a, n)), float(np.dot(v_prime - a, n)))
        if elev > STRICT_BELOW * scale:
            gap_ok = False
            if witness is None:
                witness = ("gap", root)
            break

    overlap_ok = True
    # the base is convex, so overlap against its hull is the same test and
    # sidesteps exactly-collinear boundary runs from subdivided sides
    bhull = geom.convex_hull_2d(base_reflected(dev, cap, edge))
    blo, bhi = bhull.min(axis=0), bhull.max(axis=0)
    slack = tol * scale
    for f in sorted(dev.face_points):
        pts = dev.face_points[f]
        if (pts.max(axis=0) < blo - slack).any() or (pts.min(axis=0) > bhi + slack).any():
            continue
        if geom.polygons_overlap(bhull, pts, tol=slack):
            overlap_ok = False
            if witness is None:
                witness = ("overlap", f)
            break

    return replace(
        rep,
        globally_safe=bool(rep.locally_safe and gap_ok and overlap_ok),
        witness=witness,
        gap_criterion=gap_ok,
        overlap_criterion=overlap_ok,
    )


def attach_base(dev, cap: Cap, edge, tol: float = None) -> FullNet:
    """Reflect the base across a (verified safe) edge and build the FullNet.

    All FullNet invariants are re-verified before returning: the reflected
    polygon is congruent to the base, shares exactly the attach edge, and
    overlaps no cap face.  Violations raise UnsafeEdgeError even if the
    caller believed the edge safe.
    """
    if tol is None:
        tol = global_tol()
    a, b, _, _ = _edge_frame(dev, cap, edge)
    e = (int(min(edge)), int(max(edge)))
    bpoly = base_reflected(dev, cap, edge)
    scale = _net_scale(dev)

    boundary = [int(v) for v in cap.boundary]
    base = cap.vertices[boundary][:, :2]
    # reflection reverses the ring, so undo that to index-align with base,
    # then demand every pairwise distance survive (full congruence)
    ref = bpoly[::-1]
    d0 = np.linalg.norm(base[:, None, :] - base[None, :, :], axis=2)
    d1 = np.linalg.norm(ref[:, None, :] - ref[None, :, :], axis=2)
    if float(np.max(np.abs(d0 - d1))) > 1e-9 * max(scale, 1.0):
        raise UnsafeEdgeError("reflected base polygon not congruent to the base")

    hits = sum(
        1
        for p in bpoly
        for q in (a, b)
        if np.linalg.norm(p - q) <= tol * scale
    )
    if hits != 2:
        raise UnsafeEdgeError(
            f"reflected base meets edge {e} at {hits} endpoints, expected 2"
        )

    slack = tol * scale
    bhull = geom.convex_hull_2d(bpoly)  # same region; robust to split sides
    blo, bhi = bhull.min(axis=0), bhull.max(axis=0)
    for f in sorted(dev.face_points):
        pts = dev.face_points[f]
        if (pts.max(axis=0) < blo - slack).any() or (pts.min(axis=0) > bhi + slack).any():
            continue
        if geom.polygons_overlap(bhull, pts, tol=slack):
            raise UnsafeEdgeError(f"reflected base overlaps cap face {f}")

    return FullNet(cap_net=dev, base_polygon=bpoly, attach_edge=e)


@dataclass
class PipelineResult:
    net: FullNet  # None when no safe edge was found
    reports: list  # SafeEdgeReport per scanned edge, scan order
    forest: object
    frame: object
    dev: unfold.Development
    metrics: object
    bounds: object
    net_simple: tuple  # (bool, offending pair or None)
    gap_edge: tuple
    chosen_edge: tuple  # None when no edge succeeded
    centers: dict = field(default_factory=dict)  # root -> composite center/None
    timings: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def safe_count(self) -> int:
        return sum(1 for r in self.reports if r.globally_safe)


def _boundary_edges(g):
    b = [int(v) for v in g.boundary]
    return [(b[i], b[(i + 1) % len(b)]) for i in range(len(b))]


def _gap_edge(g, frame):
    """Boundary edge the gap direction aims at: the apex's nearest edge."""
    dist, foot, idx, at_vertex = forest_mod.nearest_boundary(g, frame.apex)
    edges = _boundary_edges(g)
    if not at_vertex:
        return edges[idx], False
    # degenerate: the foot is a corner; take the adjacent edge most
    # orthogonal to the gap direction
    gdir = np.array([np.cos(frame.gap_direction), np.sin(frame.gap_direction)])
    best, score = None, -1.0
    for e in (edges[idx], edges[(idx - 1) % len(edges)]):
        t = g.positions[e[1]] - g.positions[e[0]]
        t = t / np.linalg.norm(t)
        s = abs(t[0] * gdir[1] - t[1] * gdir[0])
        if s > score:
            best, score = e, s
    return best, True


def run_pipeline(cap: Cap, delta_theta: float, exhaustive: bool = False,
                 tol: float = None, edge: tuple = None) -> PipelineResult:
    """Validate, orient, cut, develop, scan for a safe edge, attach the base.

    Does not raise on a failed scan: the result carries net=None plus every
    edge's report so callers can diagnose.  exhaustive=True keeps scanning
    (and reporting) after the first success instead of stopping early.
    Passing edge pins the scan to that single boundary edge (the development
    stays rooted at the gap edge either way).
    """
    if tol is None:
        tol = global_tol()
    timings = {}
    notes = []
    t0 = time.perf_counter()

    t = time.perf_counter()
    metrics = validate_cap(cap, tol=tol)
    bounds = curvature_bounds_check(metrics, delta_theta=delta_theta)
    if not bounds.all_ok():
        warnings.warn(
            "cap exceeds the flatness bounds; the safety guarantee does not "
            "apply, scanning anyway",
            RuntimeWarning,
            stacklevel=2,
        )
        notes.append("curvature bounds violated")
    g = project(cap, tol=tol)
    timings["validate"] = time.perf_counter() - t

    t = time.perf_counter()
    apex, gdir = forest_mod.select_apex(g, delta_theta)
    frame = forest_mod.orient_axes(g, apex, gdir, delta_theta)
    forest = forest_mod.grow_forest(g, frame)
    timings["forest"] = time.perf_counter() - t

    t = time.perf_counter()
    gap_edge, degenerate = _gap_edge(g, frame)
    if degenerate:
        notes.append("apex foot landed on a boundary corner")
    dev = unfold.develop(cap, forest, root_edge=gap_edge)
    net_simple = unfold.check_net_simple(dev, tol=tol)
    if not net_simple[0]:
        notes.append(f"cap net self-overlaps at faces {net_simple[1]}")
    timings["develop"] = time.perf_counter() - t

    t = time.perf_counter()
    centers = root_centers(cap, forest, dev, metrics=metrics)
    gdir_vec = np.array([np.cos(frame.gap_direction), np.sin(frame.gap_direction)])

    def orthogonality(e):
        tvec = g.positions[e[1]] - g.positions[e[0]]
        tvec = tvec / np.linalg.norm(tvec)
        return abs(tvec[0] * gdir_vec[1] - tvec[1] * gdir_vec[0])

    if edge is not None:
        scan = [(int(edge[0]), int(edge[1]))]
    else:
        rest = [e for e in _boundary_edges(g) if set(e) != set(gap_edge)]
        rest.sort(key=lambda e: (-orthogonality(e), e))
        scan = [gap_edge] + rest

    reports = []
    net = None
    chosen = None
    if net_simple[0]:
        for e in scan:
            rep = locally_safe(dev, cap, forest, e, centers=centers)
            if rep.locally_safe:
                rep = globally_safe(dev, cap, forest, e, centers=centers, tol=tol)
            reports.append(rep)
            if rep.globally_safe and net is None:
                try:
                    net = attach_base(dev, cap, e, tol=tol)
                    chosen = rep.edge
                except UnsafeEdgeError as exc:
                    notes.append(f"attach failed on {rep.edge}: {exc}")
                    reports[-1] = replace(rep, globally_safe=False, witness=("attach", str(exc)))
                    continue
                if not exhaustive:
                    break
    timings["scan"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t0

    return PipelineResult(
        net=net,
        reports=reports,
        forest=forest,
        frame=frame,
        dev=dev,
        metrics=metrics,
        bounds=bounds,
        net_simple=net_simple,
        gap_edge=(int(min(gap_edge)), int(max(gap_edge))),
        chosen_edge=chosen,
        centers=centers,
        timings=timings,
        notes=notes,
    )


def unfold_polyhedron(cap: Cap, delta_theta: float, tol: float = None) -> FullNet:
    """One-call edge-unfolding of cap plus base into a single planar net."""
    result = run_pipeline(cap, delta_theta, tol=tol)
    if result.net is None:
        detail = "; ".join(result.notes) or "no boundary edge passed the scan"
        raise NoSafeEdgeError(f"cannot attach the base: {detail}", result.reports)
    return result.net
