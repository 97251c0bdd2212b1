"""Shortest path within one homotopy class.

Optimal paths only bend on cutlines, so the search space is one crossing
point per cutline of the class code. Cyclic coordinate descent updates
each crossing point to the exact 1D minimizer given its neighbors; path
length is convex in the crossing parameters, so the sweep descends
monotonically to the class optimum (up to corner contact, handled by a
jitter-and-resume polish pass).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .dissection import Cutline, DissectionMap
from .geometry import Point, dist, point_in_convex, polyline_length
from .topology import (
    OutsideFreeSpaceError,
    TopoPath,
    reduce_path,
    resolve_edges,
    runtime,
    trace,
)


@dataclass
class SolverConfig:
    """Stop when a full sweep improves the length by less than epsilon_stop
    (default 1e-6 of the map diagonal) or after max_rounds sweeps
    (default 10x the number of crossing points)."""

    epsilon_stop: Optional[float] = None
    max_rounds: Optional[int] = None

    def resolved(self, dm: DissectionMap, m: int) -> Tuple[float, int]:
        eps = self.epsilon_stop
        if eps is None:
            x0, y0, x1, y1 = dm.bounds
            eps = 1e-6 * math.hypot(x1 - x0, y1 - y0)
        rounds = self.max_rounds if self.max_rounds is not None else max(1, 10 * m)
        return eps, rounds


@dataclass
class BandState:
    """Crossing points x_0..x_{m+1}; interior points ride their cutlines."""

    points: List[Point]
    cutlines: List[Cutline]

    def length(self) -> float:
        return polyline_length(self.points)


@dataclass
class SolveResult:
    path: List[Point]
    length: float
    rounds: int
    round_costs: List[float] = field(default_factory=list)
    polish_costs: List[float] = field(default_factory=list)


def project_on_cutline(x_prev: Point, x_next: Point, c: Cutline) -> Point:
    """Point on cutline c minimizing |x_prev - x| + |x - x_next|.

    Straight-through crossings return the intersection; otherwise the
    minimum sits at the clamped crossing of the (reflected) sightline
    with the cutline's supporting line.
    """
    ax, ay = c.a
    bx, by = c.b
    ex, ey = bx - ax, by - ay
    elen2 = ex * ex + ey * ey
    if elen2 == 0.0:
        return c.a

    def clamp_param(t: float) -> Point:
        t = max(0.0, min(1.0, t))
        return (ax + t * ex, ay + t * ey)

    def param_of(p: Point) -> float:
        return ((p[0] - ax) * ex + (p[1] - ay) * ey) / elen2

    # signed side of the supporting line (cross of edge with point offset)
    sp = ex * (x_prev[1] - ay) - ey * (x_prev[0] - ax)
    sn = ex * (x_next[1] - ay) - ey * (x_next[0] - ax)

    if sp == 0.0 and sn == 0.0:
        # both collinear with the cutline: every point between their clamped
        # projections is optimal; take the midpoint of that range
        return clamp_param(0.5 * (max(0.0, min(1.0, param_of(x_prev)))
                                  + max(0.0, min(1.0, param_of(x_next)))))
    if sp == 0.0:
        # bending away from the line costs more than bending at x_prev
        return clamp_param(param_of(x_prev))
    if sn == 0.0:
        return clamp_param(param_of(x_next))

    if sp * sn < 0.0:
        target = x_next
    else:
        # same side: reflect x_next across the line so the optimal bend
        # unfolds into a straight sightline
        d = 2.0 * sn / elen2
        target = (x_next[0] + d * ey, x_next[1] - d * ex)

    s1 = ex * (target[1] - ay) - ey * (target[0] - ax)
    u = sp / (sp - s1)
    px = x_prev[0] + (target[0] - x_prev[0]) * u
    py = x_prev[1] + (target[1] - x_prev[1]) * u
    return clamp_param(param_of((px, py)))


def shortest_in_class(code: TopoPath, x_s: Point, x_e: Point, dm: DissectionMap,
                      cfg: Optional[SolverConfig] = None,
                      validate_class: bool = False) -> SolveResult:
    """Shortest polyline from x_s to x_e through the cells of ``code``.

    The endpoints must lie in the first and last cells of the code. With
    ``validate_class`` the result's trace is checked to reduce back to the
    code; crossing points that settled exactly on cutline endpoints are
    nudged inward when that check fails from corner contact.
    """
    cfg = cfg or SolverConfig()
    first = dm.cells[code.nodes[0]]
    last = dm.cells[code.nodes[-1]]
    if point_in_convex(first.vertices, x_s, dm.eps, check=False) == "exterior":
        raise ValueError("start point is not in the first cell of the code")
    if point_in_convex(last.vertices, x_e, dm.eps, check=False) == "exterior":
        raise ValueError("end point is not in the last cell of the code")

    path = code
    if path.edges is None:
        path = resolve_edges(runtime(dm).get_graph(), path)
    cuts = [dm.cutlines[eid] for eid in path.edges]
    m = len(cuts)
    eps_stop, max_rounds = cfg.resolved(dm, m)

    if m == 0:
        length = dist(x_s, x_e)
        pts = [x_s, x_e] if x_s != x_e else [x_s]
        return SolveResult(pts, length, 0, [length])

    band = BandState([x_s] + [c.point_at(0.5) for c in cuts] + [x_e], cuts)
    rounds, costs = _descend(band, eps_stop, max_rounds)
    rounds2, polish = _polish_snags(band, eps_stop, max_rounds, dm)

    pts = _dedup(band.points)
    result = SolveResult(pts, polyline_length(pts), rounds + rounds2, costs, polish)
    if validate_class:
        result = _ensure_class(result, band, path, dm, x_s, x_e)
    return result


def _descend(band: BandState, eps_stop: float, max_rounds: int):
    costs = [band.length()]
    rounds = 0
    for _ in range(max_rounds):
        rounds += 1
        pts = band.points
        for k in range(1, len(pts) - 1):
            pts[k] = project_on_cutline(pts[k - 1], pts[k + 1], band.cutlines[k - 1])
        cost = band.length()
        improvement = costs[-1] - cost
        costs.append(cost)
        if improvement < eps_stop:
            break
    return rounds, costs


def _polish_snags(band: BandState, eps_stop: float, max_rounds: int,
                  dm: DissectionMap):
    """Jitter points stuck on cutline endpoints and resume the descent.

    Descent can stall when several crossing points collapse onto a shared
    corner; a deterministic nudge along each snagged cutline re-opens the
    coordinate moves. Keeps the better of the two states.
    """
    snagged = []
    for k, c in enumerate(band.cutlines):
        p = band.points[k + 1]
        if dist(p, c.a) <= dm.eps or dist(p, c.b) <= dm.eps:
            snagged.append(k)
    if not snagged:
        return 0, []

    before_pts = list(band.points)
    before_cost = band.length()
    for k in snagged:
        c = band.cutlines[k]
        t = 1e-4 if dist(band.points[k + 1], c.a) <= dm.eps else 1.0 - 1e-4
        band.points[k + 1] = c.point_at(t)
    rounds, costs = _descend(band, eps_stop, max_rounds)
    if band.length() > before_cost:
        band.points[:] = before_pts
        return rounds, costs + [before_cost]
    return rounds, costs


def _dedup(points: Sequence[Point]) -> List[Point]:
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def _ensure_class(result: SolveResult, band: BandState, code: TopoPath,
                  dm: DissectionMap, x_s: Point, x_e: Point) -> SolveResult:
    want = reduce_path(code).nodes
    try:
        if tuple(reduce_path(trace(dm, result.path)).nodes) == want:
            return result
    except OutsideFreeSpaceError:
        pass  # corner contact confused the tracer; nudge into cutline interiors
    # corner contact blurred the trace; pull every crossing point a hair
    # into its cutline interior and re-emit
    pts = [x_s]
    for k, c in enumerate(band.cutlines):
        p = band.points[k + 1]
        t_num = (p[0] - c.a[0]) * (c.b[0] - c.a[0]) + (p[1] - c.a[1]) * (c.b[1] - c.a[1])
        t = t_num / max(c.length() ** 2, 1e-300)
        t = max(1e-6, min(1.0 - 1e-6, t))
        pts.append(c.point_at(t))
    pts.append(x_e)
    pts = _dedup(pts)
    out = SolveResult(pts, polyline_length(pts), result.rounds,
                      result.round_costs, result.polish_costs)
    got = tuple(reduce_path(trace(dm, out.path)).nodes)
    if got != want:
        raise RuntimeError(f"solver path reduces to {got}, expected {want}")
    return out
