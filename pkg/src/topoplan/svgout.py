"""Minimal SVG emitter for dissections, trees and paths."""

from __future__ import annotations

from typing import List, Optional, Sequence

from .dissection import DissectionMap
from .geometry import Point

_CLASS_COLORS = ("#d33682", "#6c71c4", "#2aa198", "#b58900", "#cb4b16", "#859900")


def render_svg(dm: DissectionMap, tree_edges: Optional[Sequence] = None,
               class_paths: Optional[Sequence[Sequence[Point]]] = None,
               best_path: Optional[Sequence[Point]] = None,
               width: int = 800) -> str:
    x0, y0, x1, y1 = dm.bounds
    span_x = max(x1 - x0, 1e-9)
    span_y = max(y1 - y0, 1e-9)
    height = int(width * span_y / span_x)
    pad = 0.02 * span_x

    def sx(x):
        return (x - x0 + pad) / (span_x + 2 * pad) * width

    def sy(y):
        return (y - y0 + pad) / (span_y + 2 * pad) * height

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="#1c1c1c"/>']

    for cell in dm.cells:
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in cell.vertices)
        out.append(f'<polygon points="{pts}" fill="#eee8d5" stroke="#93a1a1" '
                   f'stroke-width="0.6"/>')
    for cl in dm.cutlines:
        dash = "2,3" if not cl.from_bridge else "1,2"
        out.append(f'<line x1="{sx(cl.a[0]):.2f}" y1="{sy(cl.a[1]):.2f}" '
                   f'x2="{sx(cl.b[0]):.2f}" y2="{sy(cl.b[1]):.2f}" '
                   f'stroke="#268bd2" stroke-width="0.8" stroke-dasharray="{dash}"/>')
    if tree_edges:
        for (a, b) in tree_edges:
            out.append(f'<line x1="{sx(a[0]):.2f}" y1="{sy(a[1]):.2f}" '
                       f'x2="{sx(b[0]):.2f}" y2="{sy(b[1]):.2f}" '
                       f'stroke="#586e75" stroke-width="0.5"/>')
    for i, path in enumerate(class_paths or []):
        color = _CLASS_COLORS[i % len(_CLASS_COLORS)]
        out.append(_polyline(path, sx, sy, color, 1.2, dashed=True))
    if best_path:
        out.append(_polyline(best_path, sx, sy, "#dc322f", 2.5))
        for p, color in ((best_path[0], "#859900"), (best_path[-1], "#dc322f")):
            out.append(f'<circle cx="{sx(p[0]):.2f}" cy="{sy(p[1]):.2f}" r="4" '
                       f'fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out)


def _polyline(path: Sequence[Point], sx, sy, color: str, width: float,
              dashed: bool = False) -> str:
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in path)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash}/>')


def tree_segments(tree) -> List:
    segs = []
    for nid in range(1, tree.count):
        segs.append((tree.point(int(tree.parent[nid])), tree.point(nid)))
    return segs
