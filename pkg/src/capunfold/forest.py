"""Wedge-monotone spanning forests of a cap projection.

The plane around a chosen apex vertex q is split into four wedges of width
theta = pi/2 - delta_theta plus a narrow leftover cone of aperture
4 * delta_theta (the gap) aimed at the nearest boundary point:

                 gap (4 dt)
                  \  |  /
             Q0    \ | /    Q3
                    \|/
          -----------q-----------
                    /|\
             Q1    / | \    Q2
                  /  |  \

    ray j = axis_angle + 2 dt + j * theta   (j = 0..4; ray 4 = ray 0 - 4 dt)
    Q_j   = directions in [ray j, ray j+1), counterclockwise from the gap's
            left edge, each closed on its clockwise ray and open on its
            counterclockwise ray; q itself belongs to Q0 by convention.

Every internal vertex grows a path whose step directions stay inside its
wedge's own closed angular span [ray j, ray j + theta].  Such a cone is
closed under addition, so paths never leave their wedge, strictly advance
along the wedge bisector, and terminate on the boundary or on an earlier
path.  A step inside the span always exists when the largest projected
triangle angle is at most theta; otherwise the growth stops with
StuckVertexError naming the blocked vertex.

With delta_theta = 0 the frame degenerates to the classical four closed
quadrants of a nonobtuse triangulation: the gap cone has zero aperture and
the axis perturbation budget (delta_theta / 4) is zero, so the caller must
supply a gap_direction that already clears every vertex off the four rays.
"""

from dataclasses import dataclass, field

import numpy as np

ANGLE_EPS = 1e-9  # angular cushion for on-ray and wedge-membership tests


class NoInternalVerticesError(ValueError):
    """The projection has no internal vertices to span."""


class CannotOrientError(RuntimeError):
    """No admissible axis rotation clears all vertices off the wedge rays."""


class StuckVertexError(RuntimeError):
    """A vertex has no incident edge inside its monotonicity wedge."""


@dataclass(frozen=True)
class QuadrantFrame:
    apex: int
    axis_angle: float  # orientation of the wedge fan, radians
    theta: float  # wedge width, pi/2 - delta_theta
    gap_direction: float  # center of the empty cone toward the boundary

    def __post_init__(self):
        if not 0 < self.theta <= np.pi / 2:
            raise ValueError("theta must lie in (0, pi/2]")

    @property
    def delta_theta(self) -> float:
        return np.pi / 2 - self.theta

    def rays(self) -> np.ndarray:
        """The four wedge boundary directions, counterclockwise from gap."""
        base = self.axis_angle + 2 * self.delta_theta
        return np.mod(base + self.theta * np.arange(4), 2 * np.pi)

    def quadrant_of_direction(self, direction: float) -> int:
        """Wedge index 0..3, or -1 for the gap cone."""
        t = np.mod(direction - (self.axis_angle + 2 * self.delta_theta), 2 * np.pi)
        k = int(t // self.theta)
        return k if k < 4 else -1


@dataclass
class CutForest:
    parent: dict  # internal vertex -> next vertex toward the root
    roots: list  # boundary vertices reached, sorted
    quadrant_of: dict  # internal vertex -> wedge index 0..3

    def cut_edges(self) -> set:
        return {(min(v, p), max(v, p)) for v, p in self.parent.items()}

    def children(self) -> dict:
        out = {}
        for v, p in self.parent.items():
            out.setdefault(p, []).append(v)
        return {k: sorted(vs) for k, vs in out.items()}

    def tree_vertices(self, root: int) -> list:
        """All internal vertices of the tree rooted at a boundary vertex."""
        kids = self.children()
        order, stack = [], list(kids.get(root, []))
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(kids.get(v, []))
        return sorted(order)


def _wrap(angle):
    """Signed wrap to (-pi, pi]."""
    return np.pi - np.mod(np.pi - angle, 2 * np.pi)


def point_segment_distance(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    foot = a + t * ab
    return float(np.linalg.norm(p - foot)), foot, t


def nearest_boundary(g, v: int):
    """Closest boundary-polygon point to vertex v.

    Returns (distance, point, edge_index, at_vertex): edge_index is the
    boundary edge (boundary[i], boundary[i+1]) realizing the minimum and
    at_vertex flags a minimum attained at a polygon corner.
    """
    p = g.positions[v]
    ring = g.positions[g.boundary]
    best = (np.inf, None, -1, 0.0)
    for i in range(len(ring)):
        d, foot, t = point_segment_distance(p, ring[i], ring[(i + 1) % len(ring)])
        if d < best[0]:
            best = (d, foot, i, t)
    d, foot, i, t = best
    at_vertex = t < 1e-9 or t > 1 - 1e-9
    return d, foot, i, at_vertex


def select_apex(g, delta_theta: float = None):
    """Internal vertex nearest the boundary and the direction toward it.

    Ties go to the lower vertex id.  When delta_theta is given, the open
    cone of aperture 4 * delta_theta about the returned direction is
    verified empty of other internal vertices (CannotOrientError if not).
    """
    if len(g.internal) == 0:
        raise NoInternalVerticesError("projection has no internal vertices")
    best_v, best = None, (np.inf, None)
    for v in g.internal:
        d, foot, _, _ = nearest_boundary(g, int(v))
        if d < best[0]:
            best_v, best = int(v), (d, foot)
    direction = best[1] - g.positions[best_v]
    gap_direction = float(np.arctan2(direction[1], direction[0]))
    if delta_theta is not None:
        blocked = _cone_members(g, best_v, gap_direction, 2 * delta_theta)
        if blocked:
            raise CannotOrientError(
                f"internal vertices {blocked} lie in the gap cone of apex {best_v}"
            )
    return best_v, gap_direction


def _cone_members(g, apex: int, center: float, half_aperture: float) -> list:
    """Internal vertices strictly inside the open cone at the apex."""
    out = []
    pos = g.positions[apex]
    for v in g.internal:
        if int(v) == apex:
            continue
        d = g.positions[int(v)] - pos
        ang = np.arctan2(d[1], d[0])
        if abs(_wrap(ang - center)) < half_aperture - ANGLE_EPS:
            out.append(int(v))
    return out


def _min_ray_clearance(g, apex: int, frame: QuadrantFrame) -> float:
    """Smallest angular distance from any other vertex to any wedge ray."""
    pos = g.positions[apex]
    others = [v for v in range(len(g.positions)) if v != apex]
    d = g.positions[others] - pos
    ang = np.arctan2(d[:, 1], d[:, 0])
    rays = np.concatenate([frame.rays(), [frame.axis_angle - 2 * frame.delta_theta]])
    diff = np.abs(_wrap(ang[:, None] - rays[None, :]))
    return float(diff.min())


def orient_axes(g, apex: int, gap_direction: float, delta_theta: float) -> QuadrantFrame:
    """Set the axis along gap_direction, nudged until no vertex sits on a ray.

    Perturbations are searched in 1e-7 rad steps of alternating sign up to
    +-delta_theta / 4; each candidate must keep every vertex clear of the
    five rays and keep the classification hole (the cone about the
    perturbed axis) free of internal vertices.  The cone about the original
    gap_direction is verified once up front.
    """
    if not 0 <= delta_theta < np.pi / 2:
        raise ValueError("delta_theta must lie in [0, pi/2)")
    theta = np.pi / 2 - delta_theta
    blocked = _cone_members(g, apex, gap_direction, 2 * delta_theta)
    if blocked:
        raise CannotOrientError(
            f"internal vertices {blocked} lie in the gap cone about gap_direction"
        )
    step = 1e-7
    max_k = int(np.floor(delta_theta / 4 / step))
    for k in range(0, max_k + 1):
        for sign in ((1,) if k == 0 else (1, -1)):
            axis = gap_direction + sign * k * step
            frame = QuadrantFrame(apex, float(axis), float(theta), float(gap_direction))
            if _min_ray_clearance(g, apex, frame) <= ANGLE_EPS:
                continue
            if k > 0 and _cone_members(g, apex, axis, 2 * delta_theta):
                continue
            return frame
    raise CannotOrientError(
        f"no axis rotation within +-{delta_theta / 4:.2e} rad clears all "
        f"vertices off the rays while keeping the gap cone empty"
    )


def _classify(g, frame: QuadrantFrame, v: int) -> int:
    if v == frame.apex:
        return 0
    d = g.positions[v] - g.positions[frame.apex]
    k = frame.quadrant_of_direction(float(np.arctan2(d[1], d[0])))
    if k < 0:
        raise CannotOrientError(f"internal vertex {v} falls in the gap cone")
    return k


def grow_forest(g, frame: QuadrantFrame) -> CutForest:
    """Span every internal vertex with wedge-monotone boundary-rooted paths.

    From each unassigned vertex (in increasing id order) a path is grown by
    repeatedly stepping along the incident edge whose direction lies in the
    vertex's wedge span and is closest to the wedge bisector (ties to the
    lower vertex id), stopping at the boundary or at an already assigned
    vertex.  Deterministic for identical inputs.
    """
    internal = set(int(v) for v in g.internal)
    parent, quadrant_of, roots = {}, {}, set()
    for start in sorted(internal):
        if start in quadrant_of:
            continue
        cur = start
        quadrant_of[cur] = _classify(g, frame, cur)
        while True:
            k = quadrant_of[cur]
            ray = frame.axis_angle + 2 * frame.delta_theta + k * frame.theta
            pos = g.positions[cur]
            best = None
            for w in g.adjacency[cur]:
                w = int(w)
                d = g.positions[w] - pos
                ang = np.arctan2(d[1], d[0])
                t = np.mod(ang - ray, 2 * np.pi)
                if t >= 2 * np.pi - ANGLE_EPS:
                    t = 0.0
                if t <= frame.theta + ANGLE_EPS:
                    score = (abs(t - frame.theta / 2), w)
                    if best is None or score < best[0]:
                        best = (score, w)
            if best is None:
                raise StuckVertexError(
                    f"vertex {cur} has no edge inside wedge {k}; projected "
                    f"triangulation violates the max-angle <= theta precondition"
                )
            w = best[1]
            parent[cur] = w
            if w not in internal:
                roots.add(w)
                break
            if w in quadrant_of:
                break
            quadrant_of[w] = _classify(g, frame, w)
            if quadrant_of[w] != k:
                raise CannotOrientError(
                    f"path stepped from wedge {k} into wedge {quadrant_of[w]} "
                    f"at vertex {w}; frame is inconsistent"
                )
            cur = w
    return CutForest(parent=parent, roots=sorted(roots), quadrant_of=quadrant_of)


@dataclass
class MonotoneReport:
    ok: bool
    theta: float
    violations: list = field(default_factory=list)  # (leaf, width, path)


def verify_monotone(forest: CutForest, g, frame: QuadrantFrame) -> MonotoneReport:
    """Check every leaf-to-root path fits one closed wedge of width theta.

    The wedge is free per path (minimal enclosing angular interval), which
    is exactly the property the safe-edge argument consumes.
    """
    internal = set(forest.parent)
    parents = set(forest.parent.values())
    leaves = [v for v in internal if v not in parents]
    violations = []
    for leaf in sorted(leaves):
        path, cur = [leaf], leaf
        while cur in forest.parent:
            cur = forest.parent[cur]
            path.append(cur)
        steps = np.diff(g.positions[path], axis=0)
        angles = np.sort(np.mod(np.arctan2(steps[:, 1], steps[:, 0]), 2 * np.pi))
        if len(angles) > 1:
            gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
            width = 2 * np.pi - float(gaps.max())
        else:
            width = 0.0
        if width > frame.theta + ANGLE_EPS:
            violations.append((leaf, width, path))
    return MonotoneReport(ok=not violations, theta=frame.theta, violations=violations)
