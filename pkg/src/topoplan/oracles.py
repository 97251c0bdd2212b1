"""Independent verification oracles.

Nothing here shares code with the planner or the class solver: the grid
searches work on rasterizations and the crossing-word invariant works on
rays, so they can arbitrate the fast-path implementations.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dissection import DissectionMap
from .geometry import Point, dist
from .gridmap import OccupancyGrid
from .topology import TopoPath, resolve_edges, runtime

SQRT2 = math.sqrt(2.0)

_MOVES = [(1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
          (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2)]


class UnreachableError(RuntimeError):
    """No path exists between the requested endpoints."""


# ---------------------------------------------------------------------------
# Plain grid Dijkstra (global shortest path, any class)
# ---------------------------------------------------------------------------

def oracle_dijkstra(grid: OccupancyGrid, start: Point, goal: Point,
                    strict_diagonals: bool = True) -> Tuple[float, List[Point]]:
    """8-connected Dijkstra over free cells; lengths in map units.

    Diagonal steps cost sqrt(2) and (by default) require both adjacent
    orthogonal cells to be free, so paths cannot clip corners that the
    continuous map blocks.
    """
    free = grid.free_mask
    h, w = free.shape
    res = grid.resolution
    s = _snap_to_free(free, start, res)
    g = _snap_to_free(free, goal, res)
    if s is None or g is None:
        raise UnreachableError("endpoint is not in free space")

    INF = np.inf
    dist_map = np.full((h, w), INF)
    parent = np.full((h, w, 2), -1, dtype=np.int32)
    sr, sc = s
    gr, gc = g
    dist_map[sr, sc] = 0.0
    pq = [(0.0, sr, sc)]
    while pq:
        d, r, c = heapq.heappop(pq)
        if (r, c) == (gr, gc):
            break
        if d > dist_map[r, c]:
            continue
        for dc, dr, cost in _MOVES:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < h and 0 <= nc < w) or not free[nr, nc]:
                continue
            if strict_diagonals and dr != 0 and dc != 0:
                if not (free[r, nc] and free[nr, c]):
                    continue
            nd = d + cost
            if nd < dist_map[nr, nc]:
                dist_map[nr, nc] = nd
                parent[nr, nc] = (r, c)
                heapq.heappush(pq, (nd, nr, nc))

    if not np.isfinite(dist_map[gr, gc]):
        raise UnreachableError("goal not reachable on the grid")

    cells = [(gr, gc)]
    while cells[-1] != (sr, sc):
        r, c = cells[-1]
        cells.append(tuple(parent[r, c]))
    cells.reverse()
    path = [((c + 0.5) * res, (r + 0.5) * res) for r, c in cells]
    length = dist_map[gr, gc] * res
    # account for the snap from the requested endpoints to cell centers
    length += dist(start, path[0]) + dist(goal, path[-1])
    return float(length), [start] + path + [goal]


def _snap_to_free(free: np.ndarray, p: Point, res: float,
                  radius: int = 3) -> Optional[Tuple[int, int]]:
    h, w = free.shape
    c = int(p[0] / res)
    r = int(p[1] / res)
    best = None
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and free[nr, nc]:
                d = (dr * dr + dc * dc, abs(dr) + abs(dc))
                if best is None or d < best[0]:
                    best = (d, (nr, nc))
    return best[1] if best else None


# ---------------------------------------------------------------------------
# Class-restricted Dijkstra on a dissection rasterization
# ---------------------------------------------------------------------------

@dataclass
class DissectionRaster:
    """Node lattice over a dissection; cell_of[r, c] = containing cell or -1."""

    dm: DissectionMap
    nx: int
    ny: int
    xs: np.ndarray
    ys: np.ndarray
    cell_of: np.ndarray
    step_x: float
    step_y: float


def rasterize_dissection(dm: DissectionMap, n: int = 200) -> DissectionRaster:
    x0, y0, x1, y1 = dm.bounds
    pad_x = (x1 - x0) * 1e-6
    pad_y = (y1 - y0) * 1e-6
    xs = np.linspace(x0 + pad_x, x1 - pad_x, n)
    ys = np.linspace(y0 + pad_y, y1 - pad_y, n)
    gx, gy = np.meshgrid(xs, ys)
    cell_of = np.full((n, n), -1, dtype=np.int32)
    for cell in dm.cells:  # ascending id: first hit wins, matching locate ties
        pts = np.asarray(cell.vertices)
        ex = np.roll(pts[:, 0], -1) - pts[:, 0]
        ey = np.roll(pts[:, 1], -1) - pts[:, 1]
        inside = np.ones_like(gx, dtype=bool)
        for k in range(len(pts)):
            d = ex[k] * (gy - pts[k, 1]) - ey[k] * (gx - pts[k, 0])
            inside &= d >= -dm.eps
            if not inside.any():
                break
        cell_of[(cell_of < 0) & inside] = cell.id
    return DissectionRaster(dm, n, n, xs, ys, cell_of,
                            float(xs[1] - xs[0]) if n > 1 else 1.0,
                            float(ys[1] - ys[0]) if n > 1 else 1.0)


def class_restricted_dijkstra(raster: DissectionRaster, code: TopoPath,
                              x_s: Point, x_e: Point) -> float:
    """Length of a shortest lattice path whose trace follows ``code``.

    States are (node, position in code); a move either stays in the
    current cell or properly crosses the next cutline of the code. Every
    returned length corresponds to a genuine polyline of the class, so it
    upper-bounds the continuous class optimum.
    """
    dm = raster.dm
    path = code if code.edges is not None else resolve_edges(runtime(dm).get_graph(), code)
    nodes = path.nodes
    cuts = [dm.cutlines[eid] for eid in (path.edges or ())]
    cell_of = raster.cell_of
    ny, nx = cell_of.shape
    xs, ys = raster.xs, raster.ys

    s = _nearest_node_in_cell(raster, x_s, nodes[0])
    e = _nearest_node_in_cell(raster, x_e, nodes[-1])
    if s is None or e is None:
        raise UnreachableError("no lattice node inside an endpoint cell")

    m = len(nodes)
    INF = math.inf
    dist_map = np.full((m, ny, nx), INF)
    sr, sc = s
    er, ec = e
    dist_map[0, sr, sc] = 0.0
    pq = [(0.0, 0, sr, sc)]
    while pq:
        d, k, r, c = heapq.heappop(pq)
        if k == m - 1 and (r, c) == (er, ec):
            break
        if d > dist_map[k, r, c]:
            continue
        here = (xs[c], ys[r])
        for dc, dr, _ in _MOVES:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < ny and 0 <= nc < nx):
                continue
            target_cell = cell_of[nr, nc]
            if target_cell < 0:
                continue
            there = (xs[nc], ys[nr])
            step = math.hypot(there[0] - here[0], there[1] - here[1])
            if target_cell == nodes[k]:
                nk = k
            elif k + 1 < m and target_cell == nodes[k + 1] and \
                    _crosses(here, there, cuts[k]):
                nk = k + 1
            else:
                continue
            nd = d + step
            if nd < dist_map[nk, nr, nc]:
                dist_map[nk, nr, nc] = nd
                heapq.heappush(pq, (nd, nk, nr, nc))

    best = dist_map[m - 1, er, ec]
    if not np.isfinite(best):
        raise UnreachableError("class not reachable on the lattice")
    best += dist(x_s, (xs[sc], ys[sr])) + dist(x_e, (xs[ec], ys[er]))
    return float(best)


def _nearest_node_in_cell(raster: DissectionRaster, p: Point, cell_id: int):
    rows, cols = np.nonzero(raster.cell_of == cell_id)
    if rows.size == 0:
        return None
    d = (raster.xs[cols] - p[0]) ** 2 + (raster.ys[rows] - p[1]) ** 2
    i = int(np.argmin(d))
    return int(rows[i]), int(cols[i])


def _crosses(a: Point, b: Point, cl) -> bool:
    c, d = cl.a, cl.b
    o1 = _cross3(a, b, c)
    o2 = _cross3(a, b, d)
    o3 = _cross3(c, d, a)
    o4 = _cross3(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def _cross3(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


# ---------------------------------------------------------------------------
# Crossing-word invariant (h-signature)
# ---------------------------------------------------------------------------

def oracle_hsignature(polyline: Sequence[Point], representatives: Sequence[Point],
                      eps: float = 1e-9) -> Tuple[int, ...]:
    """Reduced word of signed crossings against upward rays.

    One vertical ray is cast up from each obstacle representative; letter
    +(i+1) / -(i+1) records the polyline crossing ray i left-to-right /
    right-to-left. Adjacent inverse letters cancel. Two polylines with the
    same endpoints are homotopic iff their reduced words are equal.
    Representatives are perturbed and the word recomputed when a vertex
    lands exactly on a ray.
    """
    reps = list(representatives)
    for attempt in range(16):
        word = _crossing_word(polyline, reps, eps)
        if word is not None:
            return _reduce_word(word)
        reps = [(x + (attempt + 1) * max(eps, 1e-12) * 10.0, y) for x, y in reps]
    raise RuntimeError("could not separate polyline vertices from rays")


def _crossing_word(polyline, reps, eps):
    word: List[int] = []
    for i in range(len(polyline) - 1):
        (x0, y0), (x1, y1) = polyline[i], polyline[i + 1]
        hits = []
        for ridx, (rx, ry) in enumerate(reps):
            if abs(x0 - rx) <= eps or abs(x1 - rx) <= eps:
                return None  # vertex on the ray: perturb and retry
            if (x0 < rx) == (x1 < rx):
                continue
            t = (rx - x0) / (x1 - x0)
            ycross = y0 + t * (y1 - y0)
            if ycross > ry:
                hits.append((t, (ridx + 1) if x1 > x0 else -(ridx + 1)))
        hits.sort()
        word.extend(letter for _, letter in hits)
    return word


def _reduce_word(word: List[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)
