"""Command line interface.

Subcommands cover the pipeline stages: validate a mesh, generate a cap,
grow a cut forest, develop the cap, scan edges for safety, run the full
unfold with the base attached, and build the adversarial scene.  Exit codes:
0 success, 2 no safe edge found, 3 invalid or unparsable cap.
"""

import argparse
import json
import sys

import numpy as np

from . import base, capgen, forest as forest_mod, io, unfold
from .cap import CapValidationError, curvature_bounds_check, project, validate_cap
from .capgen import AdversarialScene, GenParams, GenerationError

EXIT_OK = 0
EXIT_NO_SAFE_EDGE = 2
EXIT_INVALID_CAP = 3


def _add_delta_theta(p):
    p.add_argument(
        "--delta-theta", type=float, default=3.0, metavar="DEG",
        help="quadrant tilt angle in degrees (default 3)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="capunfold",
        description="Edge-unfold a nearly flat triangulated convex cap, base included.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a mesh and print its curvature metrics")
    p.add_argument("off", help="input ASCII OFF file")

    p = sub.add_parser("gen", help="generate a seeded random cap as OFF")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=50, help="target internal vertex count")
    p.add_argument("--phi", type=float, default=0.06, help="max face tilt (radians)")
    p.add_argument("--sides", type=int, default=12, help="base polygon sides")
    p.add_argument("--out", required=True, help="output OFF path")

    p = sub.add_parser("forest", help="grow the quadrant cut forest and emit it as JSON")
    p.add_argument("off")
    _add_delta_theta(p)
    p.add_argument("--json", help="write the forest JSON here instead of stdout")
    p.add_argument("--svg", help="optional overlay of the projected cap and cuts")

    p = sub.add_parser("unfold", help="develop the cut cap and emit the net")
    p.add_argument("off")
    _add_delta_theta(p)
    p.add_argument("--svg", help="net drawing")
    p.add_argument("--json", help="gap segments and composite centers")

    p = sub.add_parser("safe-edges", help="report every boundary edge's safety verdict")
    p.add_argument("off")
    _add_delta_theta(p)
    p.add_argument("--json", help="full run report")

    p = sub.add_parser("full", help="unfold and attach the base across a safe edge")
    p.add_argument("off")
    _add_delta_theta(p)
    p.add_argument(
        "--edge", default="auto",
        help="boundary edge index to attach across, or 'auto' to scan (default)",
    )
    p.add_argument("--svg", help="net drawing")
    p.add_argument("--json", help="run report")

    p = sub.add_parser("counterexample", help="build the shallow-cut adversarial scene")
    p.add_argument("--ngon", type=int, default=12)
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--cut-angle", type=float, default=0.15, help="radians")
    p.add_argument("--svg", help="scene drawing")

    return ap


def cmd_validate(args) -> int:
    cap = io.read_off(args.off)
    m = validate_cap(cap)
    print(f"valid cap: {len(cap.vertices)} vertices, {len(cap.triangles)} faces, "
          f"{len(cap.boundary)} boundary")
    print(f"Phi = {m.phi_max:.6g}  Omega = {m.omega_total:.6g}")
    return EXIT_OK


def cmd_gen(args) -> int:
    cap = capgen.generate_cap(
        GenParams(seed=args.seed, n_target=args.n, phi_max=args.phi,
                  boundary_sides=args.sides)
    )
    io.write_off(cap, args.out)
    print(f"wrote {args.out}: {len(cap.vertices)} vertices, {len(cap.triangles)} faces")
    return EXIT_OK


def _grow(cap, delta_theta_deg):
    dt = np.radians(delta_theta_deg)
    metrics = validate_cap(cap)
    g = project(cap)
    apex, gdir = forest_mod.select_apex(g, dt)
    frame = forest_mod.orient_axes(g, apex, gdir, dt)
    return dt, g, frame, forest_mod.grow_forest(g, frame), metrics


def cmd_forest(args) -> int:
    cap = io.read_off(args.off)
    dt, g, frame, f, _ = _grow(cap, args.delta_theta)
    doc = {
        "schema": 1,
        "delta_theta": dt,
        "apex": int(frame.apex),
        "axis_angle": float(frame.axis_angle),
        "gap_direction": float(frame.gap_direction),
        "roots": [int(r) for r in f.roots],
        "parent": {str(v): int(p) for v, p in sorted(f.parent.items())},
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.svg:
        dev = unfold.develop(cap, f)
        io.write_svg(io.net_document(dev, cap, f), args.svg)
    print(f"forest: {len(f.roots)} trees, {len(f.cut_edges())} cut edges",
          file=sys.stderr)
    return EXIT_OK


def cmd_unfold(args) -> int:
    cap = io.read_off(args.off)
    dt, g, frame, f, metrics = _grow(cap, args.delta_theta)
    gap_edge, _ = base._gap_edge(g, frame)
    dev = unfold.develop(cap, f, root_edge=gap_edge)
    centers = base.root_centers(cap, f, dev, metrics=metrics)
    simple, clash = unfold.check_net_simple(dev)
    if args.svg:
        io.write_svg(io.net_document(dev, cap, f, centers=centers), args.svg)
    if args.json:
        doc = {
            "schema": 1,
            "gap_segments": {
                str(r): io._jsonable(np.asarray(dev.gap_segments[r]))
                for r in sorted(dev.gap_segments)
            },
            "composite_centers": {
                str(r): None if c is None else io._jsonable(c)
                for r, c in sorted(centers.items())
            },
            "net_simple": bool(simple),
        }
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"developed {len(dev.face_points)} faces, {len(dev.gap_segments)} gaps, "
          f"net {'simple' if simple else f'overlaps at {clash}'}")
    return EXIT_OK


def cmd_safe_edges(args) -> int:
    cap = io.read_off(args.off)
    res = base.run_pipeline(cap, np.radians(args.delta_theta), exhaustive=True)
    for r in res.reports:
        print(f"edge {r.edge}: locally_safe={r.locally_safe} "
              f"globally_safe={r.globally_safe}")
    print(f"{res.safe_count} of {len(res.reports)} scanned edges are globally safe")
    if args.json:
        io.write_report(res, args.json)
    return EXIT_OK if res.safe_count else EXIT_NO_SAFE_EDGE


def cmd_full(args) -> int:
    cap = io.read_off(args.off)
    edge = None
    if args.edge != "auto":
        try:
            i = int(args.edge)
        except ValueError:
            raise SystemExit(f"--edge must be an integer index or 'auto', got {args.edge!r}")
        b = [int(v) for v in cap.boundary]
        edge = (b[i % len(b)], b[(i + 1) % len(b)])
    res = base.run_pipeline(cap, np.radians(args.delta_theta), edge=edge)
    if args.json:
        io.write_report(res, args.json)
    if args.svg:
        bp = res.net.base_polygon if res.net is not None else None
        io.write_svg(
            io.net_document(res.dev, cap, res.forest, base_polygon=bp,
                            centers=res.centers),
            args.svg,
        )
    if res.net is None:
        detail = "; ".join(res.notes) or "no boundary edge passed the scan"
        print(f"no safe edge: {detail}", file=sys.stderr)
        return EXIT_NO_SAFE_EDGE
    print(f"attached base across edge {res.chosen_edge}; "
          f"scanned {len(res.reports)} edges")
    return EXIT_OK


def cmd_counterexample(args) -> int:
    scene = AdversarialScene(n_gon=args.ngon, omega=args.omega,
                             cut_angle=args.cut_angle)
    poly, seqs = capgen.generate_counterexample(scene)
    reports = capgen.scene_edge_reports(poly, seqs)
    safe = sum(r["safe"] for r in reports)
    for r in reports:
        tag = "safe" if r["safe"] else f"blocked by sliver {r['offender']}"
        print(f"edge {r['edge']}: {tag}")
    print(f"{safe} of {len(reports)} edges admit the base")
    if args.svg:
        io.write_svg(io.scene_document(poly, seqs), args.svg)
    return EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "gen": cmd_gen,
    "forest": cmd_forest,
    "unfold": cmd_unfold,
    "safe-edges": cmd_safe_edges,
    "full": cmd_full,
    "counterexample": cmd_counterexample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (io.OffParseError, io.NonDiskTopologyError, CapValidationError,
            GenerationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CAP
    except base.NoSafeEdgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SAFE_EDGE


if __name__ == "__main__":
    sys.exit(main())
