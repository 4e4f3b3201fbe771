"""Composite rotation centers and the center-of-gravity approximation.

Composing k small planar rotations gives one rotation by the total angle
about some center c.  Locating c exactly needs the full composition; the
cheap estimate p is the angle-weighted mean of the individual centers.
This script shows, numerically, everything the library promises about
that estimate: the closed form for two rotations, the 1/8 error constant,
the per-link error estimate for chains, and hull membership.

Run:  python3 demos/01_rotation_centers.py
"""

import numpy as np

from capunfold import geom


def two_rotations():
    print("-- two rotations --")
    p1, p2 = np.zeros(2), np.array([1.0, 0.0])
    for w1, w2 in [(0.2, 0.1), (0.05, 0.05), (1e-3, 1e-3)]:
        seq = [(w2, p2), (w1, p1)]  # the rotation about p2 acts first
        c_true = geom.fixed_point(geom.compose(seq))
        c_form = geom.two_rotation_center(w1, w2)
        p = geom.cg_center(seq)
        print(f"  w=({w1:g},{w2:g})  closed form {c_form}  "
              f"|form-true| {np.linalg.norm(c_form - c_true):.1e}  "
              f"|cg-true| {np.linalg.norm(p - c_true):.2e}")


def one_eighth_constant():
    print("-- the error constant delta/(w1+w2) -> 1/8 --")
    p1, p2 = np.zeros(2), np.array([1.0, 0.0])
    for w in [1e-1, 1e-2, 1e-3, 1e-4]:
        seq = [(w, p2), (w, p1)]
        c = geom.fixed_point(geom.compose(seq))
        p = geom.cg_center(seq)
        ratio = np.linalg.norm(c - p) / (2 * w)
        print(f"  w = {w:6g}   delta/(w1+w2) = {ratio:.9f}")


def chain_estimate():
    print("-- k-rotation chains: estimate vs true center --")
    rng = np.random.default_rng(0)
    print("   k   |c - p|      per-link est  crude bound")
    for k in (3, 5, 8):
        pts = rng.uniform(-1.0, 1.0, size=(k, 2))
        ws = rng.uniform(5e-4, 1e-3, size=k)
        seq = list(zip(ws, pts))
        c = geom.fixed_point(geom.compose(seq))
        p = geom.cg_center(seq)
        err = np.linalg.norm(c - p)
        print(f"  {k:2d}   {err:.3e}    {geom.cg_error_bound(seq):.3e}"
              f"     {geom.cg_error_bound_crude(seq):.3e}")
    print("  (the crude bound L*W/2 is guaranteed; the per-link form is the")
    print("   calibration target and is tight for comparable small angles)")


def hull_membership():
    print("-- the estimate never leaves the hull of the centers --")
    rng = np.random.default_rng(1)
    worst = -np.inf
    for _ in range(500):
        k = int(rng.integers(2, 9))
        pts = rng.uniform(-1.0, 1.0, size=(k, 2))
        seq = list(zip(rng.uniform(1e-4, 0.3, size=k), pts))
        p = geom.cg_center(seq)
        hull = geom.convex_hull_2d(pts)
        if len(hull) >= 3:
            m = len(hull)
            worst = max(worst, max(
                -geom.orient(hull[i], hull[(i + 1) % m], p) for i in range(m)
            ))
    print(f"  500 random chains: max signed excursion past a hull edge "
          f"= {worst:.1e}")


if __name__ == "__main__":
    two_rotations()
    one_eighth_constant()
    chain_estimate()
    hull_membership()
