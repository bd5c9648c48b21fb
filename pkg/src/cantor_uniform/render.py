"""Deterministic SVG output for sets and witness curves.

Coordinates are written with a fixed number of decimals so identical inputs
give byte-identical files.
"""
from __future__ import annotations

from .geometry import PathCurve, svg_path_data
from .tree import CantorTree

PALETTE = ("#1b4f72", "#2874a6", "#3498db", "#85c1e9", "#117864", "#1abc9c",
           "#7d6608", "#d4ac0d")
CURVE_COLOR = "#c0392b"
AXIS_COLOR = "#7f8c8d"


def _f(v: float) -> str:
    s = f"{v:.9f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _header(view: tuple[float, float, float, float]) -> list[str]:
    x, y, w, h = view
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_f(x)} {_f(y)} {_f(w)} {_f(h)}" width="800" height="{_f(800 * h / w)}" '
        f'preserveAspectRatio="none">',
    ]


def _level_rects(tree: CantorTree, y0: float, band: float) -> list[str]:
    out = []
    for k in range(tree.depth + 1):
        color = PALETTE[k % len(PALETTE)]
        y = y0 + k * band
        out.append(f'<g fill="{color}" stroke="none">')
        w = _f(float(tree.lengths[k]))
        for node in tree.nodes(k):
            out.append(f'<rect x="{_f(float(node.lo))}" y="{_f(y)}" width="{w}" '
                       f'height="{_f(0.8 * band)}"/>')
        out.append("</g>")
    return out


def render_set(tree: CantorTree) -> str:
    """One row of rectangles per level, E_0 at the top, in viewBox 0 -1 1 2."""
    band = 2.0 / (tree.depth + 1)
    lines = _header((0.0, -1.0, 1.0, 2.0))
    lines += _level_rects(tree, -1.0, band)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_witness(tree: CantorTree, curve: PathCurve, margin: float = 0.1) -> str:
    """The curve over the last stage of the set drawn on the real axis."""
    pts = curve.points([0.0, *curve.joints()[1:]])
    sample = curve.points([curve.length * i / 256 for i in range(257)])
    xs = [0.0, 1.0] + [p.real for p in pts] + [p.real for p in sample]
    ys = [0.0] + [p.imag for p in pts] + [p.imag for p in sample]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad = margin * max(x1 - x0, y1 - y0, 1e-9)
    view = (x0 - pad, -(y1 + pad), x1 - x0 + 2 * pad, y1 - y0 + 2 * pad)
    stroke = _f(view[2] / 400)
    lines = _header(view)
    lines.append(f'<line x1="{_f(view[0])}" y1="0" x2="{_f(view[0] + view[2])}" y2="0" '
                 f'stroke="{AXIS_COLOR}" stroke-width="{stroke}"/>')
    thick = _f(3 * float(stroke))
    lines.append(f'<g fill="{PALETTE[0]}" stroke="none">')
    for node in tree.leaves():
        lines.append(f'<rect x="{_f(float(node.lo))}" y="-{_f(float(stroke) * 1.5)}" '
                     f'width="{_f(float(node.hi - node.lo))}" height="{thick}"/>')
    lines.append("</g>")
    lines.append(f'<path d="{svg_path_data(curve, _f)}" fill="none" stroke="{CURVE_COLOR}" '
                 f'stroke-width="{stroke}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
