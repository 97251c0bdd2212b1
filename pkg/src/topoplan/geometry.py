"""Planar geometry primitives shared by the dissection and planning layers.

All routines work on plain ``(x, y)`` float tuples. Degeneracy decisions
(collinearity, boundary bands) take an absolute tolerance ``eps`` that
callers derive from the scale of their data; the map pipeline uses
``1e-9 * bounding-box diagonal``.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence, Tuple

Point = Tuple[float, float]

# seg_intersect classifications
NONE = "none"
PROPER = "proper"
TOUCH = "touch"
OVERLAP = "overlap"

# point-vs-convex-polygon classifications
INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"


def cross(o: Point, a: Point, b: Point) -> float:
    """Cross product (a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orient(a: Point, b: Point, c: Point, eps: float = 0.0) -> int:
    """Sign of (b - a) x (c - a): +1 left turn, -1 right turn, 0 if |cross| <= eps."""
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(d) <= eps:
        return 0
    return 1 if d > 0.0 else -1


def dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def lerp(a: Point, b: Point, t: float) -> Point:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def polyline_length(points: Sequence[Point]) -> float:
    """Total Euclidean length of a polyline (0 for a single point)."""
    total = 0.0
    for i in range(len(points) - 1):
        total += dist(points[i], points[i + 1])
    return total


def _on_segment_collinear(p: Point, a: Point, b: Point, eps: float) -> bool:
    # assumes p collinear with a-b; checks p within the segment's axis span
    lo_x, hi_x = min(a[0], b[0]), max(a[0], b[0])
    lo_y, hi_y = min(a[1], b[1]), max(a[1], b[1])
    return lo_x - eps <= p[0] <= hi_x + eps and lo_y - eps <= p[1] <= hi_y + eps


def _line_intersection(p: Point, q: Point, r: Point, s: Point) -> Point:
    d1x, d1y = q[0] - p[0], q[1] - p[1]
    d2x, d2y = s[0] - r[0], s[1] - r[1]
    denom = d1x * d2y - d1y * d2x
    t = ((r[0] - p[0]) * d2y - (r[1] - p[1]) * d2x) / denom
    return (p[0] + t * d1x, p[1] + t * d1y)


def seg_intersect(
    p: Point, q: Point, r: Point, s: Point, eps: float = 0.0
) -> Tuple[str, Optional[Point]]:
    """Classify the intersection of segments p-q and r-s.

    Returns one of:
      (PROPER, point)   segments cross at a single interior point of both
      (TOUCH, point)    contact at an endpoint of at least one segment
      (OVERLAP, point)  collinear with a shared sub-segment; point is its midpoint
      (NONE, None)      disjoint
    """
    o1 = orient(p, q, r, eps)
    o2 = orient(p, q, s, eps)
    o3 = orient(r, s, p, eps)
    o4 = orient(r, s, q, eps)

    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return PROPER, _line_intersection(p, q, r, s)

    if o1 == 0 and o2 == 0:
        # collinear: project on the dominant axis of p-q
        axis = 0 if abs(q[0] - p[0]) >= abs(q[1] - p[1]) else 1
        a0, a1 = sorted((p[axis], q[axis]))
        b0, b1 = sorted((r[axis], s[axis]))
        lo, hi = max(a0, b0), min(a1, b1)
        if lo > hi + eps:
            return NONE, None
        pts = [x for x in (p, q) if _on_segment_collinear(x, r, s, eps)]
        pts += [x for x in (r, s) if _on_segment_collinear(x, p, q, eps)]
        if hi - lo <= eps:
            return TOUCH, pts[0] if pts else None
        mid = 0.5 * (lo + hi)
        for a, b in ((p, q), (r, s)):
            if abs(b[axis] - a[axis]) > eps:
                t = (mid - a[axis]) / (b[axis] - a[axis])
                return OVERLAP, lerp(a, b, t)
        return OVERLAP, pts[0] if pts else None

    # an endpoint of one segment lies on the other segment
    for x, (a, b), o in ((r, (p, q), o1), (s, (p, q), o2), (p, (r, s), o3), (q, (r, s), o4)):
        if o == 0 and _on_segment_collinear(x, a, b, eps):
            return TOUCH, x
    return NONE, None


def signed_area(vertices: Sequence[Point]) -> float:
    """Shoelace signed area of an open vertex ring (positive = CCW)."""
    area = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        area += x0 * y1 - x1 * y0
    return 0.5 * area


def vertex_centroid(vertices: Sequence[Point]) -> Point:
    """Plain vertex average; inside the polygon whenever it is convex."""
    n = len(vertices)
    return (sum(v[0] for v in vertices) / n, sum(v[1] for v in vertices) / n)


def is_convex(vertices: Sequence[Point], eps: float = 0.0) -> bool:
    """True if the CCW vertex ring has no right turn sharper than eps."""
    n = len(vertices)
    for i in range(n):
        if orient(vertices[i - 1], vertices[i], vertices[(i + 1) % n], eps) < 0:
            return False
    return True


def point_in_convex(
    vertices: Sequence[Point], p: Point, eps: float = 0.0, check: bool = True
) -> str:
    """Classify p against a convex CCW polygon with an eps distance band.

    Raises ValueError for non-convex input when ``check`` is set.
    """
    if check and not is_convex(vertices, eps):
        raise ValueError("polygon is not convex")
    n = len(vertices)
    on_edge = False
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        elen = math.hypot(ex, ey)
        if elen == 0.0:
            continue
        d = (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / elen
        if d < -eps:
            return EXTERIOR
        if d <= eps:
            on_edge = True
    return BOUNDARY if on_edge else INTERIOR


def point_in_polygon(vertices: Sequence[Point], p: Point) -> bool:
    """Ray-cast containment for a general (weakly) simple polygon.

    Points on the boundary may land on either side; callers needing exact
    boundary handling should test edges directly.
    """
    x, y = p
    inside = False
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        if (ay > y) != (by > y):
            t = (y - ay) / (by - ay)
            if x < ax + t * (bx - ax):
                inside = not inside
    return inside


def project_point_segment(p: Point, a: Point, b: Point) -> Tuple[float, Point, float]:
    """Closest point on segment a-b to p: (clamped parameter, point, distance)."""
    ex, ey = b[0] - a[0], b[1] - a[1]
    den = ex * ex + ey * ey
    if den == 0.0:
        return 0.0, a, dist(p, a)
    t = ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / den
    t = max(0.0, min(1.0, t))
    q = (a[0] + t * ex, a[1] + t * ey)
    return t, q, dist(p, q)


def seg_point_distance(a: Point, b: Point, p: Point) -> float:
    return project_point_segment(p, a, b)[2]


def bbox(points: Iterable[Point]) -> Tuple[float, float, float, float]:
    xs = []
    ys = []
    for x, y in points:
        xs.append(x)
        ys.append(y)
    return min(xs), min(ys), max(xs), max(ys)


def bbox_diagonal(points: Iterable[Point]) -> float:
    x0, y0, x1, y1 = bbox(points)
    return math.hypot(x1 - x0, y1 - y0)
