"""Isometric development of a cut cap into a planar net.

Cutting the lifted forest edges and the boundary leaves a disk whose faces
are glued across the remaining fold edges.  The development places every
face in the plane by breadth-first traversal of that fold gluing, each face
congruent to its 3D original.  The net boundary is traced by the standard
corner-spin walk over free (boundary or cut) half-edges, counterclockwise
with material on the left; a vertex incident to k cut edges appears k + 1
times on the trace if it is a boundary vertex and k times if internal.

Each forest root r therefore develops into two extremal copies v and
v_prime bounding the opened gap.  The displacement v -> v_prime equals the
composition of one rotation per tree vertex, by its curvature about the
FIRST developed copy the walk visits, applied in the order the walk first
reaches the vertices.  (Regluing the slit bottom-up closes a wedge of
omega(w) at each vertex's merged copy; reading the inverse motion outward
gives exactly this composition.  An equivalent conjugate form uses last
copies in last-visit order.)  The convention is not assumed: the
gap-closure check in composite_center recomposes the motion and verifies
it maps v onto v_prime to within tolerance.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geom
from .cap import Cap, edge_face_map
from .config import global_tol


class DisconnectedDualError(RuntimeError):
    """Fold gluing does not connect all faces; the cut set is not a forest."""


class DegenerateTreeError(ValueError):
    """Tree carries zero total curvature; the gap is null, no rotation."""


class GapClosureError(RuntimeError):
    """Composed rotations failed to map a root copy onto its twin."""


@dataclass
class Development:
    placement: dict  # face -> Rigid2 taking local face coords to the plane
    face_points: dict  # face -> (3, 2) developed corner positions
    boundary_polyline: np.ndarray  # (N, 2) closed net boundary trace
    boundary_visits: list  # (vertex id, point, face) per trace corner
    gap_segments: dict  # root -> (v, v_prime)
    cut_edge_copies: dict  # cut edge -> list of developed (2, 2) segments
    root_edge: tuple  # boundary edge the development is anchored to, or None

    def copies_of(self, v: int) -> list:
        return [pt for w, pt, _ in self.boundary_visits if w == v]


def _local_coords(cap: Cap, f: int) -> np.ndarray:
    """Isometric planar copy of face f: corner 0 at origin, edge 01 on +x."""
    p = cap.vertices[cap.triangles[f]]
    e1 = p[1] - p[0]
    e2 = p[2] - p[0]
    a = np.linalg.norm(e1)
    x = float(e2 @ e1) / a
    y = np.sqrt(max(float(e2 @ e2) - x * x, 0.0))
    return np.array([[0.0, 0.0], [a, 0.0], [x, y]])


def _rigid_from_edge(src_a, src_b, dst_a, dst_b) -> geom.Rigid2:
    """Proper rigid motion sending segment (src_a, src_b) onto (dst_a, dst_b)."""
    sa = np.arctan2(*(src_b - src_a)[::-1])
    da = np.arctan2(*(dst_b - dst_a)[::-1])
    rot = geom.Rigid2(float(da - sa), np.zeros(2))
    return geom.Rigid2(rot.theta, np.asarray(dst_a, dtype=float) - rot.apply(src_a))


def _directed_edge_out(tri, v):
    """In CCW face (a, b, c), the directed edge leaving vertex v."""
    a, b, c = (int(x) for x in tri)
    return {a: b, b: c, c: a}[v]


def develop(cap: Cap, forest, root_edge=None) -> Development:
    """Cut the forest edges and lay the cap out isometrically in the plane.

    The root face is the one incident to root_edge (a boundary edge), and
    that edge is anchored at its exact projected coordinates, so a flat cap
    develops onto its own projection.  With root_edge=None, face 0 is
    anchored at its projected first corner instead.
    """
    cuts = forest.cut_edges()
    efm = edge_face_map(cap)
    for e in cuts:
        if e not in efm:
            raise ValueError(f"forest edge {e} is not an edge of the cap")

    # fold adjacency: shared non-cut internal edges
    fold_neighbors = {f: [] for f in range(len(cap.triangles))}
    for e, faces in efm.items():
        if len(faces) == 2 and e not in cuts:
            fold_neighbors[faces[0]].append((faces[1], e))
            fold_neighbors[faces[1]].append((faces[0], e))

    locals_ = {f: _local_coords(cap, f) for f in range(len(cap.triangles))}
    placement, face_points = {}, {}

    if root_edge is not None:
        e = (int(min(root_edge)), int(max(root_edge)))
        faces = efm.get(e, [])
        if len(faces) != 1:
            raise ValueError(f"root edge {root_edge} is not a boundary edge")
        root_face = faces[0]
        tri = cap.triangles[root_face]
        u = e[0] if _directed_edge_out(tri, e[0]) == e[1] else e[1]
        w = e[0] + e[1] - u
        iu = int(np.flatnonzero(tri == u)[0])
        iw = int(np.flatnonzero(tri == w)[0])
        t = _rigid_from_edge(
            locals_[root_face][iu],
            locals_[root_face][iw],
            cap.vertices[u, :2],
            cap.vertices[w, :2],
        )
    else:
        # anchor face 0 rigidly: corner 0 at its projected position, edge 01
        # along its projected direction (exact for flat caps)
        root_face = 0
        tri = cap.triangles[0]
        d = cap.vertices[tri[1], :2] - cap.vertices[tri[0], :2]
        theta = float(np.arctan2(d[1], d[0]))
        t = geom.Rigid2(theta, cap.vertices[tri[0], :2].astype(float))

    placement[root_face] = t
    face_points[root_face] = t.apply(locals_[root_face])
    queue = [root_face]
    while queue:
        f = queue.pop(0)
        tri_f = cap.triangles[f]
        for h, e in fold_neighbors[f]:
            if h in placement:
                continue
            tri_h = cap.triangles[h]
            ia_f = int(np.flatnonzero(tri_f == e[0])[0])
            ib_f = int(np.flatnonzero(tri_f == e[1])[0])
            ia_h = int(np.flatnonzero(tri_h == e[0])[0])
            ib_h = int(np.flatnonzero(tri_h == e[1])[0])
            t_h = _rigid_from_edge(
                locals_[h][ia_h],
                locals_[h][ib_h],
                face_points[f][ia_f],
                face_points[f][ib_f],
            )
            placement[h] = t_h
            face_points[h] = t_h.apply(locals_[h])
            queue.append(h)
    if len(placement) != len(cap.triangles):
        raise DisconnectedDualError(
            f"fold gluing reaches {len(placement)} of {len(cap.triangles)} "
            f"faces; the cut set is not a spanning forest"
        )

    visits = _boundary_walk(cap, cuts, efm, face_points, root_face, root_edge)
    polyline = np.array([pt for _, pt, _ in visits])
    gaps = _gap_segments_from_visits(visits, forest)
    copies = {}
    for e in cuts:
        segs = []
        for f in efm[e]:
            tri = cap.triangles[f]
            i0 = int(np.flatnonzero(tri == e[0])[0])
            i1 = int(np.flatnonzero(tri == e[1])[0])
            segs.append(face_points[f][[i0, i1]])
        copies[e] = segs
    return Development(
        placement=placement,
        face_points=face_points,
        boundary_polyline=polyline,
        boundary_visits=visits,
        gap_segments=gaps,
        cut_edge_copies=copies,
        root_edge=tuple(root_edge) if root_edge is not None else None,
    )


def _boundary_walk(cap, cuts, efm, face_points, root_face, root_edge):
    """Corner-spin walk over free half-edges, CCW, material on the left.

    Returns the ordered closed trace as (vertex id, developed point, face)
    triples, one per boundary corner, starting at the root edge when given.
    """
    free = set()
    half_owner = {}  # directed (u, v) -> face containing it
    for f, tri in enumerate(cap.triangles):
        a, b, c = (int(x) for x in tri)
        for u, v in ((a, b), (b, c), (c, a)):
            e = (min(u, v), max(u, v))
            if len(efm[e]) == 1 or e in cuts:
                free.add((u, v))
                half_owner[(u, v)] = f

    if not free:
        return []
    if root_edge is not None:
        e = (int(min(root_edge)), int(max(root_edge)))
        start = e if e in free else (e[1], e[0])
    else:
        # start on an actual cap boundary edge, never inside a slit, so
        # that every tree's visit block is contiguous in the trace
        start = min(h for h in free if len(efm[(min(h), max(h))]) == 1)

    visits = []
    cur = start
    for _ in range(len(free) + 1):
        f = half_owner[cur]
        u, v = cur
        tri = cap.triangles[f]
        iv = int(np.flatnonzero(tri == v)[0])
        visits.append((v, face_points[f][iv].copy(), f))
        # spin around v: follow fold gluings until the outgoing edge is free
        g, w = f, _directed_edge_out(tri, v)
        while (v, w) not in free:
            e = (min(v, w), max(v, w))
            pair = efm[e]
            g = pair[0] if pair[1] == g else pair[1]
            w = _directed_edge_out(cap.triangles[g], v)
        cur = (v, w)
        if cur == start:
            break
    else:
        raise DisconnectedDualError("boundary walk failed to close")
    return visits


def _tree_visit_sequence(visits, forest, root):
    """Rotation order for one root: vertices by ascending first visit.

    Each tree vertex contributes one rotation about the copy of it the walk
    visits FIRST; contributions compose in the order the walk first reaches
    the vertices (shallow before deep).  For branching trees this is forced:
    the conjugate last-copy form works in last-visit order, but mixing the
    two breaks closure.
    """
    tree = set(forest.tree_vertices(root))
    first_index = {}
    for i, (w, _, _) in enumerate(visits):
        if w in tree and w not in first_index:
            first_index[w] = i
    order = sorted(first_index, key=lambda w: first_index[w])
    return order


def _gap_segments_from_visits(visits, forest):
    gaps = {}
    for root in forest.roots:
        pts = [pt for w, pt, _ in visits if w == root]
        if len(pts) < 2:
            continue  # root of an empty gap (should not happen: >= 1 cut)
        gaps[root] = (pts[0].copy(), pts[-1].copy())
    return gaps


def gap_segments(dev: Development, forest) -> dict:
    """Original and displaced root copies bounding each opened gap."""
    return _gap_segments_from_visits(dev.boundary_visits, forest)


@dataclass
class CompositeCenterReport:
    root: int
    center: np.ndarray  # true composite rotation center
    cg: np.ndarray  # curvature-weighted center of gravity of the tree
    gap_angle: float  # direction of v -> v_prime
    total_omega: float
    bound: float  # cg_error_bound of the sequence
    within_bound: bool  # |center - cg| <= 1.2 * bound

    def seq(self):
        return self._seq

    _seq: list = field(default_factory=list, repr=False)


def composite_center(cap: Cap, forest, root: int, dev: Development = None, tol: float = None, metrics=None) -> CompositeCenterReport:
    """Single rotation equivalent to the opened gap at one forest root.

    Builds the tree's rotation sequence (curvature, developed position) in
    first-visit boundary-walk order using each vertex's first-visited copy,
    composes it, and extracts the fixed point.  The composition is verified
    to map the root's first-visited copy v onto its last-visited copy
    v_prime (gap closure); failure raises GapClosureError since it means
    the development and the rotation model disagree.

    Pass precomputed ``metrics`` (from validate_cap) to skip re-validation
    when calling this for many roots of the same cap.
    """
    if tol is None:
        tol = global_tol()
    if dev is None:
        dev = develop(cap, forest)
    tree = forest.tree_vertices(root)
    if not tree:
        raise ValueError(f"vertex {root} roots an empty tree")
    if metrics is None:
        from .cap import validate_cap

        metrics = validate_cap(cap)
    omega = metrics.omega
    total = sum(omega[v] for v in tree)
    if total <= geom.THETA_DEGENERATE:
        raise DegenerateTreeError(
            f"tree at root {root} carries zero curvature; gap is null"
        )
    order = _tree_visit_sequence(dev.boundary_visits, forest, root)
    copies = {w: dev.copies_of(w) for w in order}
    seq = [(omega[w], copies[w][0]) for w in order]
    motion = geom.compose(seq)
    v, v_prime = dev.gap_segments[root]
    scale = max(float(np.abs(dev.boundary_polyline).max()), 1.0)
    err = float(np.linalg.norm(motion.apply(v) - v_prime))
    if err > tol * scale:
        raise GapClosureError(
            f"root {root}: composed rotations miss the displaced copy by {err:.3e}"
        )
    center = geom.fixed_point(motion)
    cg = geom.cg_center(seq)
    # a lone rotation is its own center: cg coincides and the error is nil
    bound = geom.cg_error_bound(seq) if len(seq) > 1 else 0.0
    # extracting the fixed point divides by sin(total/2), so rounding in the
    # composed motion is amplified by 1/total; allow exactly that much slack
    floor = 32.0 * np.finfo(float).eps * scale / total
    d = v_prime - v
    report = CompositeCenterReport(
        root=int(root),
        center=center,
        cg=cg,
        gap_angle=float(np.arctan2(d[1], d[0])),
        total_omega=float(total),
        bound=float(bound),
        within_bound=bool(np.linalg.norm(center - cg) <= 1.2 * bound + floor),
    )
    report._seq = seq
    return report


def check_net_simple(dev: Development, tol: float = None):
    """(True, None) when no two placed faces' interiors overlap.

    Pairwise separating-axis tests over a uniform-grid broad phase; pairs
    glued across a fold edge are exempt (they share that edge by
    construction).  Returns (False, (f, g)) at the first offending pair.
    """
    if tol is None:
        tol = global_tol()
    faces = sorted(dev.face_points)
    pts = dev.face_points
    lo = np.min([pts[f].min(axis=0) for f in faces], axis=0)
    size = max(float(np.linalg.norm(pts[f].max(axis=0) - pts[f].min(axis=0))) for f in faces)
    size = max(size, 1e-12)
    cells = {}
    spans = {}
    for f in faces:
        mn = np.floor((pts[f].min(axis=0) - lo) / size).astype(int)
        mx = np.floor((pts[f].max(axis=0) - lo) / size).astype(int)
        spans[f] = (mn, mx)
        for i in range(mn[0], mx[0] + 1):
            for j in range(mn[1], mx[1] + 1):
                cells.setdefault((i, j), []).append(f)
    # fold-glued pairs share a developed edge by construction; detect that
    # coincidence directly instead of threading adjacency through the type
    scale = max(float(np.abs(dev.boundary_polyline).max()), 1.0) if len(dev.boundary_polyline) else 1.0
    checked = set()
    for bucket in cells.values():
        for i in range(len(bucket)):
            for j in range(i + 1, len(bucket)):
                f, g = bucket[i], bucket[j]
                if (f, g) in checked:
                    continue
                checked.add((f, g))
                if _faces_share_developed_edge(pts[f], pts[g], scale, tol):
                    continue
                if geom.polygons_overlap(pts[f], pts[g], tol=tol * scale):
                    return False, (f, g)
    return True, None


def _faces_share_developed_edge(a, b, scale, tol):
    for i in range(3):
        for j in range(3):
            pa = a[[i, (i + 1) % 3]]
            pb = b[[j, (j + 1) % 3]]
            if (
                np.linalg.norm(pa[0] - pb[1]) <= tol * scale
                and np.linalg.norm(pa[1] - pb[0]) <= tol * scale
            ):
                return True
    return False
