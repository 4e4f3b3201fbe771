"""Tests for cap validation, projection, and curvature metrics.

The hexagonal pyramid is the hand-checkable instance: apex at height h over
a regular hexagon of circumradius 1 (side length 1), six slant faces.
Closed forms used as oracles:

    apex face angle   2 * asin(1 / (2 sqrt(1 + h^2)))
    omega(apex)       2*pi - 12 * asin(1 / (2 sqrt(1 + h^2)))
    phi_max           atan(2h / sqrt(3))   (slant plane over the apothem)
"""

import numpy as np
import pytest

from capunfold import cap as capmod
from capunfold.cap import (
    Cap,
    CrossingEdgesError,
    InternalVertexHeightError,
    NegativeCurvatureError,
    NonAcuteTriangleError,
    NonConvexBoundaryError,
    NonManifoldEdgeError,
    NonPlanarBoundaryError,
    TriangleOrientationError,
    curvature_bounds_check,
    project,
    validate_cap,
)


def hex_pyramid(h=0.2):
    ang = np.arange(6) * np.pi / 3
    ring = np.stack([np.cos(ang), np.sin(ang), np.zeros(6)], axis=1)
    verts = np.vstack([[0.0, 0.0, h], ring])
    tris = np.array([[0, 1 + i, 1 + (i + 1) % 6] for i in range(6)])
    return Cap(verts, tris, np.arange(1, 7))


def flat_triangle():
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, np.sqrt(3) / 2, 0.0]])
    return Cap(verts, np.array([[0, 1, 2]]), np.array([0, 1, 2]))


def flat_hexagon():
    return hex_pyramid(h=0.0)


def saddle_mesh():
    # two raised ridge vertices with a depressed middle: hyperbolic vertex C
    s3 = np.sqrt(3)
    ring = [(2, 0), (1, s3), (-1, s3), (-2, 0), (-1, -s3), (1, -s3)]
    verts = [(x, y, 0.0) for x, y in ring]
    verts += [(-0.6, 0.0, 0.5), (0.6, 0.0, 0.5), (0.0, 0.0, 0.35)]
    A, B, C = 6, 7, 8
    H = list(range(6))
    tris = [
        (B, H[0], H[1]), (B, H[1], C), (C, H[1], H[2]), (C, H[2], A),
        (A, H[2], H[3]), (A, H[3], H[4]), (A, H[4], C), (C, H[4], H[5]),
        (C, H[5], B), (B, H[5], H[0]),
    ]
    return Cap(np.array(verts, float), np.array(tris), np.arange(6))


# ---------------------------------------------------------------------------
# validate_cap
# ---------------------------------------------------------------------------


def test_flat_triangle_metrics():
    m = validate_cap(flat_triangle())
    assert m.phi_max == 0.0
    assert m.omega == {}
    assert m.omega_total == 0.0
    assert m.delta_theta == 0.0


def test_flat_hexagon_with_internal_vertex():
    m = validate_cap(flat_hexagon())
    assert m.phi_max == pytest.approx(0.0, abs=1e-12)
    assert m.omega[0] == pytest.approx(0.0, abs=1e-12)
    assert m.omega_total == pytest.approx(0.0, abs=1e-12)


def test_pyramid_apex_curvature_closed_form():
    h = 0.2
    m = validate_cap(hex_pyramid(h))
    expect = 2 * np.pi - 12 * np.arcsin(1.0 / (2.0 * np.sqrt(1 + h * h)))
    assert m.omega[0] == pytest.approx(expect, abs=1e-12)
    assert m.omega_total == pytest.approx(expect, abs=1e-12)


def test_pyramid_phi_max_closed_form():
    h = 0.2
    m = validate_cap(hex_pyramid(h))
    assert m.phi_max == pytest.approx(np.arctan(2 * h / np.sqrt(3)), abs=1e-12)
    assert m.delta_theta == pytest.approx((m.phi_max / 0.3) ** 2, abs=1e-15)


def test_pyramid_obtuse_face_rejected():
    c = hex_pyramid(0.2)
    c.vertices[1, :2] *= 2.5  # stretch one base corner far out
    c.boundary = c.boundary  # boundary unchanged, faces now obtuse
    with pytest.raises(NonAcuteTriangleError) as err:
        validate_cap(c)
    assert "triangle" in str(err.value)


def test_missing_face_is_non_manifold():
    c = hex_pyramid(0.2)
    c.triangles = c.triangles[:-1]
    with pytest.raises(NonManifoldEdgeError):
        validate_cap(c)


def test_lifted_boundary_vertex_rejected():
    c = hex_pyramid(0.2)
    c.vertices[3, 2] = 0.1
    with pytest.raises(NonPlanarBoundaryError) as err:
        validate_cap(c)
    assert "3" in str(err.value)


def test_internal_vertex_below_base_rejected():
    c = hex_pyramid(0.2)
    c.vertices[0, 2] = -0.05
    with pytest.raises(InternalVertexHeightError):
        validate_cap(c)


def test_nonconvex_boundary_rejected():
    c = hex_pyramid(0.2)
    c.vertices[2, :2] *= 0.2  # pull one hexagon corner inward
    with pytest.raises(NonConvexBoundaryError):
        validate_cap(c)


def test_clockwise_triangle_rejected():
    c = hex_pyramid(0.2)
    c.triangles[2] = c.triangles[2][::-1]
    with pytest.raises((TriangleOrientationError, NonManifoldEdgeError)):
        validate_cap(c)


def test_saddle_negative_curvature_rejected():
    with pytest.raises(NegativeCurvatureError) as err:
        validate_cap(saddle_mesh())
    assert "8" in str(err.value)


def test_flat_cap_zero_height_is_allowed():
    # z = 0 interior vertices are the legal degenerate limit
    validate_cap(flat_hexagon())


# ---------------------------------------------------------------------------
# metric properties
# ---------------------------------------------------------------------------


def test_curvature_additivity():
    c = hex_pyramid(0.35)
    m = validate_cap(c)
    internal = set(c.internal_vertices().tolist())
    corner_sum = 0.0
    for tri in c.triangles:
        ang = capmod.triangle_angles(c.vertices[tri])
        for corner, v in enumerate(tri):
            if int(v) in internal:
                corner_sum += ang[corner]
    other = 2 * np.pi * len(internal) - corner_sum
    assert m.omega_total == pytest.approx(other, abs=1e-9)


def test_scaling_invariance():
    c1 = hex_pyramid(0.25)
    c2 = hex_pyramid(0.25)
    c2.vertices = c2.vertices * 7.3
    m1, m2 = validate_cap(c1), validate_cap(c2)
    assert m1.phi_max == pytest.approx(m2.phi_max, abs=1e-10)
    assert m1.omega_total == pytest.approx(m2.omega_total, abs=1e-10)
    for v in m1.omega:
        assert m1.omega[v] == pytest.approx(m2.omega[v], abs=1e-10)


# ---------------------------------------------------------------------------
# project
# ---------------------------------------------------------------------------


def test_flat_projection_is_identity_on_xy():
    c = flat_hexagon()
    g = project(c)
    assert np.array_equal(g.positions, c.vertices[:, :2])


def test_projection_preserves_edges_and_adjacency():
    c = hex_pyramid(0.2)
    g = project(c)
    assert len(g.edges) == 12  # 6 spokes + 6 boundary edges
    assert np.array_equal(g.adjacency[0], np.arange(1, 7))
    assert set(g.internal.tolist()) == {0}


def test_projection_contracts_lengths():
    c = hex_pyramid(0.4)
    g = project(c)
    for u, v in g.edges:
        planar = np.linalg.norm(g.positions[u] - g.positions[v])
        spatial = np.linalg.norm(c.vertices[u] - c.vertices[v])
        assert planar <= spatial + 1e-12


def test_projection_reports_non_acute_faces():
    # steep pyramid: 3D faces acute, but the projection has 120 deg fans
    ang = np.arange(3) * 2 * np.pi / 3
    ring = np.stack([np.cos(ang), np.sin(ang), np.zeros(3)], axis=1)
    verts = np.vstack([[0.0, 0.0, 0.15], ring])
    tris = np.array([[0, 1 + i, 1 + (i + 1) % 3] for i in range(3)])
    c = Cap(verts, tris, np.arange(1, 4))
    g = project(c)
    assert len(g.non_acute_faces) == 3
    assert g.max_face_angle == pytest.approx(2 * np.pi / 3, abs=1e-12)


def test_crossing_segments_detected():
    positions = np.array([(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)])
    edges = np.array([(0, 1), (2, 3)])
    with pytest.raises(CrossingEdgesError):
        capmod._check_planar_embedding(positions, edges, 1e-9)


def test_vertex_inside_edge_detected():
    positions = np.array([(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0)])
    edges = np.array([(0, 1), (2, 3)])
    with pytest.raises(CrossingEdgesError):
        capmod._check_planar_embedding(positions, edges, 1e-9)


# ---------------------------------------------------------------------------
# curvature_bounds_check
# ---------------------------------------------------------------------------


def test_bounds_flat_cap_all_pass():
    m = validate_cap(flat_hexagon())
    rep = curvature_bounds_check(m, delta_theta=np.radians(3))
    assert rep.omega_ok and rep.phi_ok and rep.tree_ok
    assert rep.all_ok()
    assert rep.omega_total == pytest.approx(0.0, abs=1e-12)


def test_bounds_threshold_value_at_three_degrees():
    # at the max permitted phi for slant 3 deg, omega must stay below
    # pi * phi^2 = 0.09 pi * delta_theta, about 0.28 * delta_theta
    dt = 0.05236
    threshold = np.pi * (0.3 * np.sqrt(dt)) ** 2
    assert threshold == pytest.approx(0.28 * dt, rel=0.02)
    assert threshold == pytest.approx(0.0148, abs=3e-4)


def test_bounds_flag_failures():
    h = 0.8  # steep pyramid violates the smallness hypotheses
    m = validate_cap(hex_pyramid(h))
    rep = curvature_bounds_check(m, delta_theta=np.radians(3))
    assert not rep.phi_ok
    assert not rep.all_ok()


def test_bounds_default_slant_makes_phi_tight():
    m = validate_cap(hex_pyramid(0.2))
    rep = curvature_bounds_check(m)
    assert rep.delta_theta == pytest.approx(m.delta_theta)
    assert rep.phi_ok  # equality case of phi <= 0.3 sqrt(slant)
