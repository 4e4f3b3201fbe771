"""Why the cut layout matters: a 12-gon scene where no edge works.

A flat disk with spoke-like interior cuts ("juts") aimed at the boundary:
when the polygon has enough sides and each spoke carries a little
rotation, every boundary edge fails the attachment test, so the base
cannot be glued anywhere.  Fewer sides leave room; so does re-aiming the
cuts the way the quadrant forest does.  This is the scene the safe-edge
machinery is defending against.

Run:  python3 demos/04_counterexample.py
Output: demos/out/scene12.svg
"""

import pathlib

import numpy as np

from capunfold import capgen, io
from capunfold.capgen import AdversarialScene

OUT = pathlib.Path(__file__).parent / "out"


def report(label, poly, seqs):
    reps = capgen.scene_edge_reports(poly, seqs)
    safe = sum(r["safe"] for r in reps)
    print(f"  {label}: {safe} of {len(reps)} edges admit the base")
    return safe


def main():
    OUT.mkdir(exist_ok=True)
    print("-- spokes toward every edge, omega = 0.25 per spoke --")
    for n in (8, 12):
        poly, seqs = capgen.generate_counterexample(
            AdversarialScene(n_gon=n, omega=0.25, cut_angle=0.15)
        )
        report(f"{n}-gon", poly, seqs)

    print("-- smallest omega that blocks every edge (grid sweep) --")
    grid = np.linspace(0.005, 0.6, 120)
    for n in (8, 9, 12):
        w = capgen.sweep_unsafe_threshold(n, 0.15, grid)
        print(f"  {n}-gon: {'none on the grid' if w is None else f'omega = {w:.3f}'}")

    print("-- same 12-gon, cuts re-aimed radially (quadrant style) --")
    poly, seqs = capgen.quadrant_rerun(
        AdversarialScene(n_gon=12, omega=0.25, cut_angle=0.15)
    )
    report("12-gon rerun", poly, seqs)

    poly, seqs = capgen.generate_counterexample(
        AdversarialScene(n_gon=12, omega=0.25, cut_angle=0.15)
    )
    io.write_svg(io.scene_document(poly, seqs), OUT / "scene12.svg")
    print(f"wrote {OUT / 'scene12.svg'}")


if __name__ == "__main__":
    main()
