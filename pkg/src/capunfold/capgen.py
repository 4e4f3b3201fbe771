"""Seeded cap generation and the adversarial shallow-cut scene.

Cap generator
-------------
A regular boundary_sides-gon (circumradius 1) is fanned from its center into
corner triangles, each barycentrically refined into m^2 similar triangles.
Ring j of the refinement is the boundary polygon scaled by j/m, so the
piecewise-linear gauge gamma (0 at the center, 1 on the boundary) is constant
on each ring.  Vertices are lifted to

    z = eps * (1 - gamma^2)

which is exactly 0 on the boundary and concave as a function of the plane:
gamma is convex, t -> t^2 is convex increasing, so z is eps times (1 minus a
convex function).  The lifted mesh samples that surface ring-exactly, and a
piecewise-linear interpolation of a concave function is a convex cap, so
every internal vertex has curvature >= 0 by construction, not by retry.

Jitter slides vertices ALONG their ring segments only (never across rings,
never the sector corner vertices), which keeps gamma, hence z, hence the
whole concave surface unchanged; only triangle shapes vary.  Acuteness is
rechecked after jitter and the amplitude halves on failure, 32 attempts.

The corner triangle of an n-gon fan has apex angle 2 pi / n, so the scheme
needs n >= 5 for acute output; 3- and 4-gons are refused.

Adversarial scene
-----------------
A purely 2D counterpart of a bad cut forest on a regular n-gon: every cut
segment hugs a boundary edge at a shallow angle, so each opened gap juts a
sliver of material almost orthogonally across the neighboring edge, and for
n >= 9 every reflected base placement collides with one of the slivers.  One
tree is a 2-path through the center with near-zero curvature there.  The
same boundary rerun with steep wedge-aligned cuts (the quadrant rule) sends
the slivers gliding along the boundary instead, and safe edges reappear.
"""

from dataclasses import dataclass

import numpy as np

from . import geom
from .cap import Cap
from .config import global_tol

JITTER_FRAC = 0.35  # initial slide amplitude, fraction of one ring slot
ANGLE_LIMIT = np.radians(84.0)  # accepted max triangle angle, 3D or projected
MAX_RETRIES = 32


class GenerationError(RuntimeError):
    """Generator could not satisfy a cap invariant; message names it."""


@dataclass
class GenParams:
    seed: int
    n_target: int = 50
    phi_max: float = 0.06
    boundary_sides: int = 12

    def __post_init__(self):
        if not self.phi_max > 0:
            raise ValueError("phi_max must be positive")
        if self.boundary_sides < 3:
            raise ValueError("boundary_sides must be at least 3")
        if self.n_target < 1:
            raise ValueError("n_target must be at least 1")


def _internal_count(n: int, m: int) -> int:
    return 1 + n * m * (m - 1) // 2


def _pick_refinement(n: int, target: int) -> int:
    best_m, best_score = None, None
    m = 1
    while True:
        count = _internal_count(n, m)
        score = abs(np.log(count / target))
        if best_score is None or score < best_score:
            best_m, best_score = m, score
        if count > 4 * target and m > 1:
            break
        m += 1
    count = _internal_count(n, best_m)
    if not (0.5 * target <= count <= 2.0 * target):
        raise GenerationError(
            f"no refinement of a {n}-gon fan lands within 2x of "
            f"{target} internal vertices (closest is {count})"
        )
    return best_m


def _ring_start(n: int, j: int) -> int:
    # ring 0 is the single center vertex, ring j >= 1 has n*j vertices
    return 1 + n * j * (j - 1) // 2


def _vertex_id(n: int, j: int, t: int) -> int:
    if j == 0:
        return 0
    return _ring_start(n, j) + (t % (n * j))


def _fan_triangles(n: int, m: int) -> np.ndarray:
    tris = []
    for s in range(n):
        for j in range(m):
            for i in range(j + 1):
                a = _vertex_id(n, j, s * j + i)
                b = _vertex_id(n, j + 1, s * (j + 1) + i)
                c = _vertex_id(n, j + 1, s * (j + 1) + i + 1)
                tris.append((a, b, c))
            for i in range(j):
                a = _vertex_id(n, j, s * j + i)
                b = _vertex_id(n, j + 1, s * (j + 1) + i + 1)
                c = _vertex_id(n, j, s * j + i + 1)
                tris.append((a, b, c))
    return np.array(tris, dtype=np.int64)


def _fan_positions(n: int, m: int, rot: float, slide: dict) -> np.ndarray:
    """Planar vertex positions; slide maps (j, s, i) -> offset in slot units."""
    corners = np.stack(
        [np.cos(rot + 2 * np.pi * np.arange(n) / n), np.sin(rot + 2 * np.pi * np.arange(n) / n)],
        axis=1,
    )
    total = _ring_start(n, m) + n * m
    pos = np.zeros((total, 2))
    for j in range(1, m + 1):
        for s in range(n):
            a, b = corners[s], corners[(s + 1) % n]
            for i in range(j):
                frac = (i + slide.get((j, s, i), 0.0)) / j
                pos[_vertex_id(n, j, s * j + i)] = (j / m) * ((1 - frac) * a + frac * b)
    return pos


def _max_triangle_angle(verts: np.ndarray, tris: np.ndarray) -> float:
    p = verts[tris]
    worst = 0.0
    for k in range(3):
        u = p[:, (k + 1) % 3] - p[:, k]
        v = p[:, (k + 2) % 3] - p[:, k]
        nu = np.linalg.norm(u, axis=1)
        nv = np.linalg.norm(v, axis=1)
        cosang = np.einsum("ij,ij->i", u, v) / (nu * nv)
        worst = max(worst, float(np.arccos(np.clip(cosang, -1, 1)).max()))
    return worst


def generate_cap(params: GenParams) -> Cap:
    """Deterministic valid cap with roughly n_target internal vertices.

    The same params always produce the bitwise-identical Cap.  Raises
    GenerationError naming the invariant that could not be met.
    """
    n = params.boundary_sides
    if n < 5:
        raise GenerationError(
            f"a {n}-gon fan has corner angle {360 // n} deg >= 90 deg; "
            "acute triangulation needs boundary_sides >= 5"
        )
    if not params.phi_max < np.pi / 2:
        raise GenerationError("phi_max must be below pi/2 for a cap")
    m = _pick_refinement(n, params.n_target)
    tris = _fan_triangles(n, m)
    rot = float(np.random.default_rng([params.seed, 7919]).uniform(0, 2 * np.pi / n))
    apothem = np.cos(np.pi / n)
    eps = 0.5 * apothem * np.tan(params.phi_max)

    last_angle = None
    for attempt in range(MAX_RETRIES):
        frac = JITTER_FRAC * 0.5**attempt if attempt < MAX_RETRIES - 1 else 0.0
        rng = np.random.default_rng([params.seed, attempt])
        slide = {}
        for j in range(2, m + 1):
            for s in range(n):
                for i in range(1, j):
                    slide[(j, s, i)] = float(rng.uniform(-frac, frac))
        pos = _fan_positions(n, m, rot, slide)
        planar_angle = _max_triangle_angle(pos, tris)
        z = np.zeros(len(pos))
        for j in range(m + 1):
            gamma = j / m
            lo = _ring_start(n, j) if j else 0
            hi = _ring_start(n, j + 1) if j < m else len(pos)
            z[lo:hi] = eps * (1.0 - gamma * gamma)
        verts = np.column_stack([pos, z])
        spatial_angle = _max_triangle_angle(verts, tris)
        last_angle = max(planar_angle, spatial_angle)
        if last_angle < ANGLE_LIMIT:
            boundary = np.arange(_ring_start(n, m), len(pos), dtype=np.int64)
            return Cap(verts, tris, boundary)
    raise GenerationError(
        f"acuteness not reached after {MAX_RETRIES} attempts, worst angle "
        f"{np.degrees(last_angle):.2f} deg"
    )


# ---------------------------------------------------------------------------
# adversarial 2D scene
# ---------------------------------------------------------------------------


@dataclass
class AdversarialScene:
    n_gon: int = 12
    omega: float = 0.25
    cut_angle: float = 0.15  # radians between each cut and its hugged edge

    def __post_init__(self):
        if self.n_gon < 3:
            raise ValueError("n_gon must be at least 3")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not 0 < self.cut_angle < np.pi / 2:
            raise ValueError("cut_angle must be in (0, pi/2)")


CUT_REACH = 0.75  # cut length as a fraction of the hugged edge
CENTER_OMEGA = 1e-6  # near-zero curvature at the central 2-path vertex


def _regular_polygon(n: int) -> np.ndarray:
    ang = 2 * np.pi * np.arange(n) / n
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def generate_counterexample(scene: AdversarialScene):
    """Boundary polygon plus one shallow-cut rotation sequence per vertex.

    Returns (polygon, seqs) where polygon is the (n, 2) counterclockwise
    boundary and seqs[j] is the rotation sequence of the tree rooted at
    vertex j, deepest rotation first.  Every tree is the single cut segment
    u_j -> v_j hugging edge (v_j, v_{j+1}) at cut_angle, except the tree at
    vertex 0, which is a 2-path through the center with curvature
    CENTER_OMEGA there.  Opening each cut by omega swings the hugged sliver
    across its own edge, so the displaced copy near v_{j+1} obstructs the
    NEIGHBORING edge's base placement once the interior angle is large
    enough (angular penetration 90 deg - cut_angle - omega/2 must exceed
    the free wedge 2 pi / n_gon * 2 left uncovered at the shared corner).
    """
    n = scene.n_gon
    poly = _regular_polygon(n)
    seqs = {}
    for j in range(n):
        nxt = poly[(j + 1) % n]
        v = poly[j]
        edge = nxt - v
        ell = np.linalg.norm(edge)
        # rotate the along-the-edge direction into the interior (interior is
        # left of the counterclockwise boundary) to hug edge (v_j, v_{j+1})
        inward = geom._rot_matrix(scene.cut_angle) @ (edge / ell)
        u = v + CUT_REACH * ell * inward
        if j == 0:
            seqs[j] = [(CENTER_OMEGA, np.zeros(2)), (scene.omega, u)]
        else:
            seqs[j] = [(scene.omega, u)]
    return poly, seqs


def scene_gap_segments(poly: np.ndarray, seqs: dict) -> dict:
    """Displaced boundary copies: root j -> (v, v_prime)."""
    out = {}
    for j, seq in seqs.items():
        v = poly[j]
        out[j] = (v.copy(), geom.compose(seq).apply(v))
    return out


def scene_jut_triangles(poly: np.ndarray, seqs: dict) -> dict:
    """Displaced sliver of material at each root: (u, v, v_prime)."""
    juts = {}
    gaps = scene_gap_segments(poly, seqs)
    for j, seq in seqs.items():
        u = seq[-1][1]  # the cut vertex adjacent to the root
        v, v_prime = gaps[j]
        juts[j] = np.array([u, v, v_prime])
    return juts


def scene_edge_reports(poly: np.ndarray, seqs: dict, tol: float = None) -> list:
    """Safety verdict per boundary edge against the displaced slivers.

    Edge j runs from vertex j to vertex j+1.  Reflecting the base across it
    must clear every sliver except the one whose cut hugs edge j itself
    (root j): that sliver is displaced material of the piece the base stays
    attached to, so it moves with the base rather than obstructing it.
    """
    if tol is None:
        tol = global_tol()
    n = len(poly)
    juts = scene_jut_triangles(poly, seqs)
    reports = []
    for j in range(n):
        a, b = poly[j], poly[(j + 1) % n]
        reflected = geom.reflect_points(poly, a, b)[::-1]  # keep CCW
        offender = None
        for k, jut in juts.items():
            if k == j:
                continue
            tri = jut if geom._ring_area(jut) > 0 else jut[::-1]
            if np.abs(geom._ring_area(tri)) < 1e-14:
                continue  # curvature so small the sliver is degenerate
            if geom.polygons_overlap(reflected, tri, tol=tol):
                offender = k
                break
        reports.append({"edge": (j, (j + 1) % n), "safe": offender is None, "offender": offender})
    return reports


def sweep_unsafe_threshold(n_gon: int, cut_angle: float, omegas) -> float:
    """Smallest omega in the grid making EVERY edge unsafe, or None."""
    for omega in omegas:
        scene = AdversarialScene(n_gon=n_gon, omega=float(omega), cut_angle=cut_angle)
        poly, seqs = generate_counterexample(scene)
        if all(not r["safe"] for r in scene_edge_reports(poly, seqs)):
            return float(omega)
    return None


def quadrant_rerun(scene: AdversarialScene):
    """Same boundary, same curvatures, cuts re-aimed by the wedge rule.

    Instead of hugging the boundary, each cut leaves its root vertex steeply,
    along the inward normal of the bisecting direction; the displaced
    slivers then glide along the boundary instead of jutting across it.
    """
    n = scene.n_gon
    poly = _regular_polygon(n)
    seqs = {}
    for j in range(n):
        prev = poly[(j - 1) % n]
        v = poly[j]
        ell = np.linalg.norm(prev - v)
        inward = -v / np.linalg.norm(v)  # straight toward the center
        u = v + CUT_REACH * ell * inward
        if j == 0:
            seqs[j] = [(CENTER_OMEGA, np.zeros(2)), (scene.omega, u)]
        else:
            seqs[j] = [(scene.omega, u)]
    return poly, seqs
