"""Mesh ingestion and net/report emission.

read_off ingests ASCII OFF triangle meshes and infers the boundary cycle;
write_off is its exact inverse (17 significant digits, so coordinates
round-trip bit-for-bit).  NetDocument gathers the layered 2D geometry of a
finished net; write_svg renders it with one group per semantic layer (cuts
red, cap boundary blue, developed fold edges black, base green) and
write_report serializes a full pipeline run as versioned JSON with every
nondeterministic value (timing) isolated in one sub-object.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import geom
from .cap import Cap, edge_face_map


class OffParseError(ValueError):
    """Malformed OFF input; the message names the offending line."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


class NonDiskTopologyError(ValueError):
    """Mesh boundary is not a single cycle (or an edge is non-manifold)."""


# ---------------------------------------------------------------------------
# OFF reading / writing
# ---------------------------------------------------------------------------


def _significant_lines(text):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def read_off(path) -> Cap:
    """Parse an ASCII OFF triangle mesh into a Cap candidate.

    Only the syntax and the disk topology are checked here; geometric
    validity (convexity, acuteness, curvature signs) is validate_cap's job.
    The boundary cycle is returned counterclockwise as seen from +z.
    """
    with open(path, encoding="ascii") as fh:
        text = fh.read()
    lines = _significant_lines(text)

    def next_line(what):
        try:
            return next(lines)
        except StopIteration:
            raise OffParseError(path, 0, f"file ended before {what}") from None

    ln, header = next_line("the OFF header")
    if header != "OFF":
        raise OffParseError(path, ln, f"expected 'OFF' header, got {header!r}")
    ln, counts = next_line("the counts line")
    parts = counts.split()
    if len(parts) != 3:
        raise OffParseError(path, ln, "counts line must be 'nv nf ne'")
    try:
        nv, nf, _ = (int(p) for p in parts)
    except ValueError:
        raise OffParseError(path, ln, f"non-integer counts {counts!r}") from None
    if nv < 3 or nf < 1:
        raise OffParseError(path, ln, f"need at least 3 vertices and 1 face, got {nv} and {nf}")

    verts = np.empty((nv, 3))
    for i in range(nv):
        ln, line = next_line(f"vertex {i}")
        parts = line.split()
        if len(parts) != 3:
            raise OffParseError(path, ln, f"vertex line needs 3 coordinates, got {len(parts)}")
        try:
            verts[i] = [float(p) for p in parts]
        except ValueError:
            raise OffParseError(path, ln, f"bad coordinate in {line!r}") from None

    tris = np.empty((nf, 3), dtype=int)
    for i in range(nf):
        ln, line = next_line(f"face {i}")
        parts = line.split()
        if not parts or parts[0] != "3":
            got = parts[0] if parts else "nothing"
            raise OffParseError(path, ln, f"only triangles are supported, face has {got} vertices")
        if len(parts) != 4:
            raise OffParseError(path, ln, "face line must be '3 i j k'")
        try:
            idx = [int(p) for p in parts[1:]]
        except ValueError:
            raise OffParseError(path, ln, f"bad vertex index in {line!r}") from None
        if any(not 0 <= j < nv for j in idx):
            raise OffParseError(path, ln, f"vertex index out of range in {line!r}")
        if len(set(idx)) != 3:
            raise OffParseError(path, ln, f"degenerate face {line!r}")
        tris[i] = idx

    for ln, line in lines:
        raise OffParseError(path, ln, f"unexpected content after the last face: {line!r}")

    return Cap(verts, tris, _boundary_cycle(verts, tris))


def _boundary_cycle(verts, tris) -> np.ndarray:
    """Order the 1-incident-face edges into one CCW cycle (viewed from +z)."""
    count = {}
    for tri in tris:
        for i in range(3):
            e = (int(tri[i]), int(tri[(i + 1) % 3]))
            e = (min(e), max(e))
            count[e] = count.get(e, 0) + 1
    if any(c > 2 for c in count.values()):
        bad = next(e for e, c in count.items() if c > 2)
        raise NonDiskTopologyError(f"edge {bad} borders more than two faces")
    border = [e for e, c in count.items() if c == 1]
    if not border:
        raise NonDiskTopologyError("mesh is closed: no boundary edge found")
    nbr = {}
    for u, v in border:
        nbr.setdefault(u, []).append(v)
        nbr.setdefault(v, []).append(u)
    if any(len(ws) != 2 for ws in nbr.values()):
        v = next(v for v, ws in nbr.items() if len(ws) != 2)
        raise NonDiskTopologyError(f"boundary branches at vertex {v}")
    start = min(nbr)
    cycle = [start, min(nbr[start])]
    while True:
        a, b = cycle[-2], cycle[-1]
        nxt = nbr[b][1] if nbr[b][0] == a else nbr[b][0]
        if nxt == start:
            break
        cycle.append(nxt)
    if len(cycle) != len(border):
        raise NonDiskTopologyError(
            f"boundary is {len(border)} edges but the cycle through vertex "
            f"{start} closes after {len(cycle)}: multiple loops"
        )
    ring = verts[cycle][:, :2]
    if geom._ring_area(ring) < 0:
        cycle.reverse()
    return np.asarray(cycle, dtype=int)


def write_off(cap: Cap, path) -> None:
    """Inverse of read_off; coordinates at 17 significant digits."""
    out = ["OFF", f"{len(cap.vertices)} {len(cap.triangles)} 0"]
    out += ["%.17g %.17g %.17g" % tuple(v) for v in cap.vertices]
    out += ["3 %d %d %d" % tuple(t) for t in cap.triangles]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# net documents
# ---------------------------------------------------------------------------


MARGIN = 0.05  # viewport padding as a fraction of the tight bounding box


@dataclass
class NetDocument:
    """Layered 2D geometry of a net, ready for rendering.

    One list of (2, 2) segments per stroke class, plus the closed rings.
    viewport is (xmin, ymin, width, height) with a 5% margin all around.
    """

    fold_edges: list
    boundary: list
    cut_edges: list
    gap_segments: list
    base_polygon: np.ndarray  # or None
    centers: list  # composite center markers
    viewport: tuple


def _viewport(chunks) -> tuple:
    pts = [np.asarray(c, dtype=float).reshape(-1, 2) for c in chunks if len(c)]
    if not pts:
        return (0.0, 0.0, 1.0, 1.0)
    allpts = np.vstack(pts)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    pad = MARGIN * max(float(np.max(hi - lo)), 1e-9)
    lo, hi = lo - pad, hi + pad
    return (float(lo[0]), float(lo[1]), float(hi[0] - lo[0]), float(hi[1] - lo[1]))


def net_document(dev, cap: Cap, forest, base_polygon=None, centers=None) -> NetDocument:
    """Classify every developed edge into its semantic layer.

    Fold edges are drawn once (both incident faces develop them onto the
    same segment); cut edges contribute every copy; the cap's own boundary
    edges form the blue outline.
    """
    efm = edge_face_map(cap)
    cuts = set(forest.cut_edges()) if forest is not None else set()
    folds, outline = [], []
    seen = set()
    for f in sorted(dev.face_points):
        tri = [int(x) for x in cap.triangles[f]]
        pts = dev.face_points[f]
        for i in range(3):
            u, v = tri[i], tri[(i + 1) % 3]
            e = (min(u, v), max(u, v))
            seg = np.array([pts[i], pts[(i + 1) % 3]])
            if len(efm[e]) == 1:
                outline.append(seg)
            elif e not in cuts:
                if e not in seen:
                    folds.append(seg)
                    seen.add(e)
    cut_segs = []
    for e in sorted(dev.cut_edge_copies):
        cut_segs.extend(np.asarray(s) for s in dev.cut_edge_copies[e])
    gaps = []
    for root in sorted(dev.gap_segments):
        v, vp = dev.gap_segments[root]
        if np.linalg.norm(vp - v) > 0:
            gaps.append(np.array([v, vp]))
    marks = []
    if centers:
        marks = [np.asarray(centers[r], dtype=float) for r in sorted(centers) if centers[r] is not None]
    bp = None if base_polygon is None else np.asarray(base_polygon, dtype=float)
    chunks = folds + outline + cut_segs + gaps + marks
    if bp is not None:
        chunks = chunks + [bp]
    return NetDocument(
        fold_edges=folds,
        boundary=outline,
        cut_edges=cut_segs,
        gap_segments=gaps,
        base_polygon=bp,
        centers=marks,
        viewport=_viewport(chunks),
    )


def scene_document(poly, seqs) -> NetDocument:
    """NetDocument for the 2D adversarial scene.

    The polygon outline is the blue layer, the cut paths are red, the
    displaced copies of each cut (where the sliver lands after opening by
    omega) are black, and the chords v -> v_prime are the gap layer.
    """
    from .capgen import scene_gap_segments

    poly = np.asarray(poly, dtype=float)
    n = len(poly)
    outline = [np.array([poly[j], poly[(j + 1) % n]]) for j in range(n)]
    gapseg = scene_gap_segments(poly, seqs)
    cuts, moved, gaps, marks = [], [], [], []
    for j in sorted(seqs):
        path = [poly[j]] + [p for _, p in reversed(seqs[j])]
        for s, t in zip(path, path[1:]):
            cuts.append(np.array([s, t]))
        motion = geom.compose(seqs[j])
        for s, t in zip(path, path[1:]):
            moved.append(np.array([motion.apply(s), motion.apply(t)]))
        v, vp = gapseg[j]
        if np.linalg.norm(vp - v) > 0:
            gaps.append(np.array([v, vp]))
        marks.append(geom.fixed_point(motion) if len(seqs[j]) > 1 else seqs[j][0][1])
    chunks = outline + cuts + moved + gaps + marks
    return NetDocument(
        fold_edges=moved,
        boundary=outline,
        cut_edges=cuts,
        gap_segments=gaps,
        base_polygon=None,
        centers=marks,
        viewport=_viewport(chunks),
    )


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_LAYER_STYLE = (
    ("development", "fold_edges", "#000000"),
    ("boundary", "boundary", "#0000cc"),
    ("cuts", "cut_edges", "#cc0000"),
    ("gaps", "gap_segments", "#dd8800"),
    ("base", "base_polygon", "#008800"),
    ("centers", "centers", "#aa00aa"),
)


def _fmt(x) -> str:
    s = "%.9g" % float(x)
    return "0" if s == "-0" else s


def write_svg(doc: NetDocument, path) -> None:
    """Render the document as standalone SVG 1.1, one <g> per layer.

    Output is deterministic: fixed layer order, fixed attribute order, and
    fixed number formatting.  The y axis is flipped so +y in model space
    points up on screen.
    """
    for name, attr, _ in _LAYER_STYLE:
        data = getattr(doc, attr)
        if data is None:
            continue
        arrs = data if isinstance(data, list) else [data]
        for a in arrs:
            if not np.all(np.isfinite(np.asarray(a, dtype=float))):
                raise ValueError(f"non-finite geometry in layer {name}")

    x0, y0, w, h = doc.viewport
    # flipping y maps the model box [y0, y0+h] onto [-(y0+h), -y0]
    view = f"{_fmt(x0)} {_fmt(-(y0 + h))} {_fmt(w)} {_fmt(h)}"
    stroke_w = _fmt(0.003 * max(w, h))
    radius = _fmt(0.006 * max(w, h))

    def seg_path(seg):
        (xa, ya), (xb, yb) = np.asarray(seg, dtype=float)
        return f'<path d="M {_fmt(xa)},{_fmt(-ya)} L {_fmt(xb)},{_fmt(-yb)}"/>'

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{view}">',
    ]
    for name, attr, color in _LAYER_STYLE:
        data = getattr(doc, attr)
        if name == "centers":
            out.append(f'<g id="{name}" fill="{color}" stroke="none">')
            for p in data:
                x, y = np.asarray(p, dtype=float)
                out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{radius}"/>')
        elif name == "base":
            out.append(
                f'<g id="{name}" fill="none" stroke="{color}" stroke-width="{stroke_w}">'
            )
            if data is not None and len(data):
                pts = " ".join(f"{_fmt(p[0])},{_fmt(-p[1])}" for p in np.asarray(data, dtype=float))
                out.append(f'<polygon points="{pts}"/>')
        else:
            out.append(
                f'<g id="{name}" fill="none" stroke="{color}" stroke-width="{stroke_w}">'
            )
            out.extend(seg_path(s) for s in data)
        out.append("</g>")
    out.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# JSON report
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()] if x.ndim else float(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def report_dict(result) -> dict:
    """The JSON report body for one pipeline run (schema version 1)."""
    b = result.bounds
    reports = [
        {
            "edge": list(r.edge),
            "locally_safe": r.locally_safe,
            "globally_safe": r.globally_safe,
            "centers": [None if c is None else _jsonable(c) for c in r.centers],
            "witness": _jsonable(r.witness),
            "gap_criterion": r.gap_criterion,
            "overlap_criterion": r.overlap_criterion,
        }
        for r in result.reports
    ]
    forest = result.forest
    doc = {
        "schema": 1,
        "metrics": {
            "phi_max": float(result.metrics.phi_max),
            "omega_total": float(result.metrics.omega_total),
            "delta_theta": float(b.delta_theta),
            "bounds": {
                "omega_bound": float(b.omega_bound),
                "omega_ok": bool(b.omega_ok),
                "phi_bound": float(b.phi_bound),
                "phi_ok": bool(b.phi_ok),
                "tree_bound": float(b.tree_bound),
                "tree_ok": bool(b.tree_ok),
            },
        },
        "forest": {
            "apex": int(result.frame.apex),
            "gap_direction": float(result.frame.gap_direction),
            "roots": [int(r) for r in forest.roots],
            "tree_sizes": {str(r): len(forest.tree_vertices(r)) for r in forest.roots},
            "cut_edges": sorted([int(u), int(v)] for u, v in forest.cut_edges()),
        },
        "gap_segments": {
            str(r): _jsonable(np.asarray(result.dev.gap_segments[r]))
            for r in sorted(result.dev.gap_segments)
        },
        "composite_centers": {
            str(r): None if c is None else _jsonable(c)
            for r, c in sorted(result.centers.items())
        },
        "edges": reports,
        "gap_edge": list(result.gap_edge),
        "chosen_edge": None if result.chosen_edge is None else list(result.chosen_edge),
        "net_simple": bool(result.net_simple[0]),
        "safe_edge_count": result.safe_count,
        "notes": list(result.notes),
        "timing": {k: float(v) for k, v in result.timings.items()},
    }
    return doc


def write_report(result, path) -> None:
    """Serialize a pipeline run as JSON; timing values live in one subtree."""
    with open(path, "w", encoding="ascii") as fh:
        json.dump(report_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
