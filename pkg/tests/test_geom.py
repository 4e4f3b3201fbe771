"""Tests for planar rotation composition, hulls, and overlap predicates.

Oracles used here are independent of the implementation under test:
homogeneous 3x3 matrix products for composition, apply-and-check for fixed
points, Sutherland-Hodgman clip areas and shapely for polygon overlap.
"""

import numpy as np
import pytest

from capunfold import geom


def rigid_matrix(omega, center):
    """Homogeneous matrix oracle for a rotation about a center."""
    c, s = np.cos(omega), np.sin(omega)
    r = np.array([[c, -s], [s, c]])
    center = np.asarray(center, dtype=float)
    m = np.eye(3)
    m[:2, :2] = r
    m[:2, 2] = center - r @ center
    return m


def compose_matrices(seq):
    m = np.eye(3)
    for omega, center in seq:
        m = rigid_matrix(omega, center) @ m
    return m


def random_seq(rng, k):
    centers = rng.uniform(-1.0, 1.0, size=(k, 2))
    omegas = rng.uniform(1e-4, 1e-3, size=k)
    return list(zip(omegas, centers))


# ---------------------------------------------------------------------------
# Rigid2 / rotation_about / compose
# ---------------------------------------------------------------------------


def test_rotation_about_zero_angle_is_identity():
    m = geom.rotation_about(0.0, (3.0, 4.0))
    assert m.theta == 0.0
    assert np.allclose(m.t, 0.0)
    assert np.allclose(m.apply((7.0, -2.0)), (7.0, -2.0))


def test_rotation_about_quarter_turn():
    m = geom.rotation_about(np.pi / 2, (0.0, 0.0))
    assert np.allclose(m.apply((1.0, 0.0)), (0.0, 1.0), atol=1e-15)


def test_rotation_about_fixes_its_center():
    rng = np.random.default_rng(11)
    for _ in range(50):
        omega = rng.uniform(-3.0, 3.0)
        center = rng.uniform(-5.0, 5.0, size=2)
        m = geom.rotation_about(omega, center)
        assert np.allclose(m.apply(center), center, atol=1e-12)


def test_theta_normalized_to_half_open_pi_interval():
    assert geom.Rigid2(3 * np.pi).theta == pytest.approx(np.pi)
    assert geom.Rigid2(-np.pi).theta == pytest.approx(np.pi)
    assert geom.Rigid2(2 * np.pi).theta == pytest.approx(0.0)


def test_inverse_roundtrip():
    rng = np.random.default_rng(12)
    for _ in range(20):
        m = geom.Rigid2(rng.uniform(-3, 3), rng.uniform(-2, 2, size=2))
        back = m.then(m.inverse())
        assert abs(back.theta) < 1e-12
        assert np.allclose(back.t, 0.0, atol=1e-12)


def test_compose_single_element():
    m = geom.compose([(0.3, (2.0, 1.0))])
    ref = geom.rotation_about(0.3, (2.0, 1.0))
    assert m.theta == pytest.approx(ref.theta)
    assert np.allclose(m.t, ref.t)


def test_compose_shared_center_adds_angles():
    p = (0.5, -0.25)
    m = geom.compose([(0.2, p), (0.3, p)])
    ref = geom.rotation_about(0.5, p)
    assert m.theta == pytest.approx(ref.theta, abs=1e-15)
    assert np.allclose(m.t, ref.t, atol=1e-15)


def test_compose_matches_matrix_oracle():
    rng = np.random.default_rng(13)
    test_pts = rng.uniform(-10.0, 10.0, size=(8, 2))
    for _ in range(40):
        seq = [(rng.uniform(0, 0.5), rng.uniform(-2, 2, size=2)) for _ in range(5)]
        ours = geom.compose(seq)
        oracle = compose_matrices(seq)
        got = ours.apply(test_pts)
        want = (test_pts @ oracle[:2, :2].T) + oracle[:2, 2]
        assert np.max(np.abs(got - want)) < 1e-12


def test_compose_empty_rejected():
    with pytest.raises(ValueError):
        geom.compose([])


def test_compose_order_first_element_first():
    # 90deg about origin then translate-like rotation differ from swapped order
    a = geom.compose([(np.pi / 2, (0.0, 0.0)), (np.pi / 2, (2.0, 0.0))])
    b = geom.compose([(np.pi / 2, (2.0, 0.0)), (np.pi / 2, (0.0, 0.0))])
    p = np.array([1.0, 0.0])
    pa = geom.rotation_about(np.pi / 2, (2.0, 0.0)).apply(
        geom.rotation_about(np.pi / 2, (0.0, 0.0)).apply(p)
    )
    assert np.allclose(a.apply(p), pa, atol=1e-12)
    assert not np.allclose(b.apply(p), pa, atol=1e-6)


# ---------------------------------------------------------------------------
# fixed_point
# ---------------------------------------------------------------------------


def test_fixed_point_recovers_constructed_center():
    got = geom.fixed_point(geom.rotation_about(0.3, (2.0, 1.0)))
    assert np.allclose(got, (2.0, 1.0), atol=1e-12)


def test_fixed_point_identity_rejected():
    with pytest.raises(geom.PureTranslationError):
        geom.fixed_point(geom.Rigid2.identity())


def test_fixed_point_random_small_sequences():
    rng = np.random.default_rng(14)
    for _ in range(100):
        seq = random_seq(rng, rng.integers(2, 8))
        m = geom.compose(seq)
        fp = geom.fixed_point(m)
        assert np.linalg.norm(m.apply(fp) - fp) < 1e-10


# ---------------------------------------------------------------------------
# two_rotation_center
# ---------------------------------------------------------------------------


def test_two_rotation_center_second_angle_zero_gives_first_center():
    assert np.allclose(geom.two_rotation_center(0.4, 0.0), (0.0, 0.0), atol=1e-15)


def test_two_rotation_center_equal_angles_closed_form():
    # equal angles land on the perpendicular bisector at height tan(w/2)/2
    got = geom.two_rotation_center(0.3, 0.3)
    assert np.allclose(got, (0.5, np.tan(0.15) / 2), atol=1e-15)
    assert got[1] == pytest.approx(0.07556760902914754, abs=1e-16)


def test_two_rotation_center_frozen_instance():
    got = geom.two_rotation_center(0.2, 0.1)
    assert np.allclose(got, (0.33277638564069983, 0.03338900953104105), atol=1e-15)


def test_two_rotation_center_matches_fixed_point_oracle():
    # the deeper rotation (about p2) acts first per the documented convention
    for w1, w2 in [(0.2, 0.1), (1e-1, 1e-2), (1e-3, 1e-3), (0.3, 0.05)]:
        seq = [(w2, (1.0, 0.0)), (w1, (0.0, 0.0))]
        oracle = geom.fixed_point(geom.compose(seq))
        assert np.linalg.norm(geom.two_rotation_center(w1, w2) - oracle) < 1e-12


def test_two_rotation_center_grid_against_oracle():
    for w1 in (1e-1, 1e-2, 1e-3):
        for w2 in (1e-1, 1e-2, 1e-3):
            seq = [(w2, (1.0, 0.0)), (w1, (0.0, 0.0))]
            oracle = geom.fixed_point(geom.compose(seq))
            assert np.linalg.norm(geom.two_rotation_center(w1, w2) - oracle) < 1e-10


def test_two_rotation_center_degenerate_sum_rejected():
    with pytest.raises(geom.DegenerateAnglesError):
        geom.two_rotation_center(0.0, 0.0)
    with pytest.raises(geom.DegenerateAnglesError):
        geom.two_rotation_center(np.pi, np.pi)


def test_error_constant_one_eighth():
    # |c - midpoint| / (w1 + w2) -> 1/8 as the angles shrink
    w = 1e-3
    c = geom.two_rotation_center(w, w)
    delta = np.linalg.norm(c - np.array([0.5, 0.0]))
    ratio = delta / (2 * w)
    assert 0.1225 <= ratio <= 0.1275
    assert ratio == pytest.approx(0.125, abs=2e-8)


# ---------------------------------------------------------------------------
# cg_center / error bounds
# ---------------------------------------------------------------------------


def test_cg_center_single():
    assert np.allclose(geom.cg_center([(0.2, (3.0, -1.0))]), (3.0, -1.0))


def test_cg_center_equal_weights_midpoint():
    got = geom.cg_center([(0.01, (0.0, 0.0)), (0.01, (1.0, 0.0))])
    assert np.allclose(got, (0.5, 0.0), atol=1e-15)


def test_cg_center_zero_total_rejected():
    with pytest.raises(ValueError):
        geom.cg_center([(0.0, (1.0, 2.0)), (0.0, (3.0, 4.0))])


def test_cg_center_inside_hull():
    rng = np.random.default_rng(15)
    for _ in range(200):
        k = rng.integers(1, 9)
        seq = [(rng.uniform(0, 1e-3), rng.uniform(-2, 2, size=2)) for _ in range(k)]
        if sum(om for om, _ in seq) == 0:
            continue
        p = geom.cg_center(seq)
        hull = geom.convex_hull_2d([c for _, c in seq])
        if len(hull) < 3:
            # degenerate hull: p must lie on the segment
            a, b = hull[0], hull[-1]
            d = b - a
            t = np.dot(p - a, d) / max(np.dot(d, d), 1e-300)
            assert np.linalg.norm(a + np.clip(t, 0, 1) * d - p) < 1e-12
            continue
        n = len(hull)
        for i in range(n):
            assert geom.orient(hull[i], hull[(i + 1) % n], p) >= -1e-12


def test_cg_error_bound_coincident_centers():
    seq = [(0.1, (2.0, 2.0)), (0.2, (2.0, 2.0))]
    assert geom.cg_error_bound(seq) == 0.0


def test_cg_error_bound_hand_value():
    # single unit link weighted by the first angle: 0.5 * 1.0 * 0.01
    seq = [(0.01, (0.0, 0.0)), (0.01, (1.0, 0.0))]
    assert geom.cg_error_bound(seq) == pytest.approx(0.005, abs=1e-18)


def test_cg_error_bound_needs_two():
    with pytest.raises(ValueError):
        geom.cg_error_bound([(0.1, (0.0, 0.0))])


def test_cg_error_bound_on_comparable_angle_chains():
    # chains whose angles are within a factor 2 of each other: the per-link
    # estimate bounds the true error with margin (measured max ratio ~1.03)
    rng = np.random.default_rng(16)
    for _ in range(300):
        k = int(rng.integers(2, 11))
        centers = rng.uniform(-1.0, 1.0, size=(k, 2))
        omegas = rng.uniform(0.5e-3, 1e-3, size=k)
        seq = list(zip(omegas, centers))
        err = np.linalg.norm(geom.fixed_point(geom.compose(seq)) - geom.cg_center(seq))
        assert err <= 1.2 * geom.cg_error_bound(seq)


def test_cg_error_bound_crude_always_bounds():
    # crude bound is valid for any chain shape, including straight chains of
    # many equal angles where the per-link estimate is exceeded
    rng = np.random.default_rng(17)
    for _ in range(300):
        k = int(rng.integers(2, 11))
        centers = rng.uniform(-1.0, 1.0, size=(k, 2))
        omegas = rng.uniform(1e-6, 1e-3, size=k)
        seq = list(zip(omegas, centers))
        err = np.linalg.norm(geom.fixed_point(geom.compose(seq)) - geom.cg_center(seq))
        assert err <= geom.cg_error_bound_crude(seq)
    # the straight equal chain that beats the per-link estimate
    k = 8
    centers = np.stack([np.linspace(0, 1, k), np.zeros(k)], axis=1)
    seq = list(zip(np.full(k, 1e-4), centers))
    err = np.linalg.norm(geom.fixed_point(geom.compose(seq)) - geom.cg_center(seq))
    assert err > geom.cg_error_bound(seq)  # per-link estimate is not a bound here
    assert err <= geom.cg_error_bound_crude(seq)


def test_cg_convergence_under_angle_scaling():
    rng = np.random.default_rng(18)
    for _ in range(50):
        k = int(rng.integers(2, 8))
        centers = rng.uniform(-1.0, 1.0, size=(k, 2))
        base = rng.uniform(0.2, 1.0, size=k)
        errs = []
        for eps in (1e-1, 1e-2, 1e-3, 1e-4):
            seq = list(zip(base * eps, centers))
            err = np.linalg.norm(
                geom.fixed_point(geom.compose(seq)) - geom.cg_center(seq)
            )
            errs.append(err)
        for lo, hi in zip(errs[1:], errs[:-1]):
            assert lo <= hi + 1e-13


# ---------------------------------------------------------------------------
# convex_hull_2d
# ---------------------------------------------------------------------------


def test_hull_square():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    hull = geom.convex_hull_2d(pts)
    assert len(hull) == 4
    assert geom._ring_area(hull) > 0  # counterclockwise
    assert {tuple(p) for p in hull} == {(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}


def test_hull_drops_interior_point():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    hull = geom.convex_hull_2d(pts)
    assert len(hull) == 4
    assert (0.5, 0.5) not in {tuple(p) for p in hull}


def test_hull_left_of_edge_predicate():
    rng = np.random.default_rng(19)
    pts = rng.normal(size=(100, 2))
    hull = geom.convex_hull_2d(pts)
    n = len(hull)
    for p in pts:
        for i in range(n):
            assert geom.orient(hull[i], hull[(i + 1) % n], p) >= -1e-12


def test_hull_collinear_degenerates_to_extremes():
    pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (0.5, 0.5)]
    hull = geom.convex_hull_2d(pts)
    assert len(hull) == 2
    assert {tuple(p) for p in hull} == {(0.0, 0.0), (2.0, 2.0)}


def test_hull_single_point():
    hull = geom.convex_hull_2d([(3.0, 4.0)])
    assert hull.shape == (1, 2)


# ---------------------------------------------------------------------------
# polygons_overlap
# ---------------------------------------------------------------------------

SQUARE = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def clip_area(subject, clip):
    """Sutherland-Hodgman intersection area oracle for convex CCW polygons."""
    out = [np.asarray(p, float) for p in subject]
    n = len(clip)
    for i in range(n):
        a = np.asarray(clip[i], float)
        b = np.asarray(clip[(i + 1) % n], float)
        inp, out = out, []
        if not inp:
            break
        for j, cur in enumerate(inp):
            nxt = inp[(j + 1) % len(inp)]
            cur_in = geom.orient(a, b, cur) >= 0
            nxt_in = geom.orient(a, b, nxt) >= 0
            if cur_in:
                out.append(cur)
            if cur_in != nxt_in:
                d1 = geom.orient(a, b, cur)
                d2 = geom.orient(a, b, nxt)
                t = d1 / (d1 - d2)
                out.append(cur + t * (nxt - cur))
    if len(out) < 3:
        return 0.0
    arr = np.array(out)
    return abs(geom._ring_area(arr))


def test_overlap_disjoint_squares():
    assert not geom.polygons_overlap(SQUARE, SQUARE + (2.0, 0.0))


def test_overlap_identical_squares():
    assert geom.polygons_overlap(SQUARE, SQUARE)


def test_overlap_shared_edge_is_touching():
    t1 = [(0, 0), (1, 0), (0, 1)]
    t2 = [(1, 0), (1, 1), (0, 1)]
    assert not geom.polygons_overlap(t1, t2)
    assert clip_area(t1, t2) < 1e-15


def test_overlap_shared_vertex_is_touching():
    t1 = [(0, 0), (1, 0), (0, 1)]
    t2 = [(1, 1 + 1e-12), (2, 1), (1, 2)]
    assert not geom.polygons_overlap(t1, t2)


def test_overlap_depth_tolerance():
    # squares interpenetrating by 0.5e-9 count as touching, 5e-9 as overlap
    shallow = SQUARE + (1.0 - 0.5e-9, 0.0)
    deep = SQUARE + (1.0 - 5e-9, 0.0)
    assert not geom.polygons_overlap(SQUARE, shallow)
    assert geom.polygons_overlap(SQUARE, deep)


def test_overlap_symmetric_and_translation_invariant():
    rng = np.random.default_rng(20)
    for _ in range(50):
        a = geom.convex_hull_2d(rng.normal(size=(8, 2)))
        b = geom.convex_hull_2d(rng.normal(size=(8, 2)) + rng.normal(scale=2, size=2))
        if len(a) < 3 or len(b) < 3:
            continue
        v1 = geom.polygons_overlap(a, b)
        assert v1 == geom.polygons_overlap(b, a)
        shift = rng.normal(scale=5, size=2)
        assert v1 == geom.polygons_overlap(a + shift, b + shift)


def test_overlap_matches_clip_area_oracle():
    rng = np.random.default_rng(21)
    checked = 0
    for _ in range(200):
        a = geom.convex_hull_2d(rng.normal(size=(10, 2)))
        b = geom.convex_hull_2d(rng.normal(size=(10, 2)) + rng.normal(scale=1.5, size=2))
        if len(a) < 3 or len(b) < 3:
            continue
        area = clip_area(a, b)
        if 0.0 < area < 1e-7:
            continue  # borderline touching, tolerance semantics differ
        assert geom.polygons_overlap(a, b) == (area > 0.0)
        checked += 1
    assert checked > 150


def test_overlap_matches_shapely():
    shapely_geom = pytest.importorskip("shapely.geometry")
    rng = np.random.default_rng(22)
    checked = 0
    for _ in range(200):
        a = geom.convex_hull_2d(rng.normal(size=(7, 2)))
        b = geom.convex_hull_2d(rng.normal(size=(7, 2)) + rng.normal(scale=1.5, size=2))
        if len(a) < 3 or len(b) < 3:
            continue
        pa = shapely_geom.Polygon(a)
        pb = shapely_geom.Polygon(b)
        area = pa.intersection(pb).area
        if 0.0 < area < 1e-7:
            continue
        assert geom.polygons_overlap(a, b) == (area > 0.0)
        checked += 1
    assert checked > 150


def test_overlap_nonconvex_ell_shape():
    ell = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    probe_inside_notch = SQUARE * 0.5 + (1.4, 1.4)  # sits in the notch
    probe_on_arm = SQUARE * 0.5 + (0.2, 0.2)
    assert not geom.polygons_overlap(ell, probe_inside_notch)
    assert geom.polygons_overlap(ell, probe_on_arm)


def test_overlap_rejects_non_simple():
    bowtie = [(0, 0), (1, 1), (1, 0), (0, 1)]
    with pytest.raises(geom.NonSimplePolygonError):
        geom.polygons_overlap(bowtie, SQUARE)
    with pytest.raises(geom.NonSimplePolygonError):
        geom.polygons_overlap([(0, 0), (1, 0)], SQUARE)
    with pytest.raises(geom.NonSimplePolygonError):
        geom.polygons_overlap([(0, 0), (1, 0), (2, 0)], SQUARE)


def test_overlap_thin_sliver_poking_into_square():
    sliver = [(0.5, 0.5), (0.6, 0.5), (0.55, 1.5)]  # pierces the top edge
    assert geom.polygons_overlap(SQUARE, sliver)


# ---------------------------------------------------------------------------
# reflect_points
# ---------------------------------------------------------------------------


def test_reflection_fixes_line_and_is_involution():
    rng = np.random.default_rng(23)
    a, b = np.array([0.0, 0.0]), np.array([1.0, 2.0])
    pts = rng.normal(size=(20, 2))
    refl = geom.reflect_points(pts, a, b)
    assert np.allclose(geom.reflect_points(refl, a, b), pts, atol=1e-12)
    on_line = np.outer(np.linspace(-2, 2, 9), b - a) + a
    assert np.allclose(geom.reflect_points(on_line, a, b), on_line, atol=1e-12)


def test_reflection_flips_orientation():
    tri = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    refl = geom.reflect_points(tri, (0.0, 0.0), (1.0, 0.0))
    assert geom._ring_area(tri) > 0
    assert geom._ring_area(refl) < 0
