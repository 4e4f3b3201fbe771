"""Unfold a shallow hexagonal pyramid into a one-piece net.

The simplest curved cap: six lateral triangles around one interior apex.
The pipeline validates the cap, grows a cut forest in the projection,
develops the surface into the plane, picks a boundary edge that is safe
to keep, and attaches the reflected base polygon across it.

Run:  python3 demos/02_pyramid_net.py
Output: demos/out/pyramid.off, demos/out/pyramid.svg, demos/out/pyramid.json
"""

import pathlib

import numpy as np

from capunfold import base, io
from capunfold.cap import Cap, validate_cap

OUT = pathlib.Path(__file__).parent / "out"


def hex_pyramid(height: float) -> Cap:
    ang = 2 * np.pi * np.arange(6) / 6
    ring = np.stack([np.cos(ang), np.sin(ang), np.zeros(6)], axis=1)
    verts = np.vstack([[[0.0, 0.0, height]], ring])
    tris = np.array([[0, 1 + i, 1 + (i + 1) % 6] for i in range(6)])
    return Cap(verts, tris, np.arange(1, 7))


def main():
    OUT.mkdir(exist_ok=True)
    cap = hex_pyramid(0.08)
    metrics = validate_cap(cap)
    print(f"cap: {len(cap.vertices)} vertices, {len(cap.triangles)} faces")
    print(f"  steepest face tilt Phi = {metrics.phi_max:.4f} rad")
    print(f"  total curvature Omega  = {metrics.omega_total:.6f} rad")

    res = base.run_pipeline(cap, delta_theta=np.radians(6.0))
    print(f"forest: apex {res.frame.apex}, roots {res.forest.roots}, "
          f"cut edges {res.forest.cut_edges()}")
    print(f"chosen base edge: {res.chosen_edge}")
    print(f"net simple: {res.net_simple[0]}")

    io.write_off(cap, OUT / "pyramid.off")
    doc = io.net_document(res.dev, cap, res.forest,
                          base_polygon=res.net.base_polygon,
                          centers=res.centers)
    io.write_svg(doc, OUT / "pyramid.svg")
    io.write_report(res, OUT / "pyramid.json")
    print(f"wrote {OUT / 'pyramid.svg'} (black: faces, green: base,")
    print("       red: cut edges, orange: gaps, purple: rotation centers)")


if __name__ == "__main__":
    main()
