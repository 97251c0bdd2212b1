"""Topology graph over a dissection and the homotopy-class encoding.

A dissection induces a multigraph: one node per convex cell, one edge per
cutline. A polyline maps to the sequence of cells it passes through
(``trace``); a node sequence maps back to a canonical polyline through
cell centroids and cutline midpoints (``realize``). Collapsing every
immediate backtrack fragment ``(x, x)`` / ``(x, y, x)`` yields a unique
reduced sequence per homotopy class (``reduce_path``), so two polylines
with shared endpoints are homotopic exactly when their reduced traces are
equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dissection import ConvexCell, Cutline, DissectionMap
from .geometry import Point, dist, lerp


class OutsideFreeSpaceError(ValueError):
    """A query point or polyline segment left the dissected free space."""

    def __init__(self, message: str, segment: int = 0):
        super().__init__(message)
        self.segment = segment


@dataclass(frozen=True)
class TopoPath:
    """Finite node walk; ``edges[i]`` is the cutline crossed between
    ``nodes[i]`` and ``nodes[i+1]`` (None when unresolved)."""

    nodes: Tuple[int, ...]
    edges: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("empty node sequence")
        if self.edges is not None and len(self.edges) != len(self.nodes) - 1:
            raise ValueError("edge count must be node count - 1")

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def end(self) -> int:
        return self.nodes[-1]

    def __len__(self) -> int:
        return len(self.nodes)


def format_code(path: TopoPath) -> str:
    return ",".join(str(n) for n in path.nodes)


def parse_code(text: str) -> TopoPath:
    try:
        nodes = tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad code string: {text!r}") from exc
    return TopoPath(nodes)


@dataclass
class TopologyGraph:
    """Undirected multigraph of cells (nodes) and cutlines (edges)."""

    nodes: List[int]
    edges: List[Tuple[int, int, int]]  # (cutline_id, cell_a, cell_b)
    adjacency: Dict[int, List[Tuple[int, int]]] = field(default_factory=dict)

    def neighbors(self, node: int) -> List[Tuple[int, int]]:
        return self.adjacency.get(node, [])

    def neighbor_nodes(self, node: int) -> List[int]:
        seen = []
        for other, _ in self.adjacency.get(node, []):
            if other not in seen:
                seen.append(other)
        return seen

    def edges_between(self, a: int, b: int) -> List[int]:
        return [eid for other, eid in self.adjacency.get(a, []) if other == b]


def build_graph(dm: DissectionMap) -> TopologyGraph:
    """One node per cell, one edge per cutline. Self-loops are invalid."""
    adjacency: Dict[int, List[Tuple[int, int]]] = {c.id: [] for c in dm.cells}
    edges = []
    for cl in dm.cutlines:
        if cl.left_cell == cl.right_cell:
            raise ValueError(f"cutline {cl.id} borders a single cell")
        edges.append((cl.id, cl.left_cell, cl.right_cell))
        adjacency[cl.left_cell].append((cl.right_cell, cl.id))
        adjacency[cl.right_cell].append((cl.left_cell, cl.id))
    for lst in adjacency.values():
        lst.sort()
    return TopologyGraph([c.id for c in dm.cells], edges, adjacency)


# ---------------------------------------------------------------------------
# Point location
# ---------------------------------------------------------------------------

class CellIndex:
    """Uniform-bucket index over cell bounding boxes for point location."""

    def __init__(self, dm: DissectionMap, buckets_per_axis: Optional[int] = None):
        self.dm = dm
        x0, y0, x1, y1 = dm.bounds
        n = max(1, buckets_per_axis or int(math.sqrt(len(dm.cells))) * 2)
        self.nx = self.ny = n
        self.x0, self.y0 = x0, y0
        self.sx = (x1 - x0) / n or 1.0
        self.sy = (y1 - y0) / n or 1.0
        self.buckets: Dict[Tuple[int, int], List[int]] = {}
        for cell in dm.cells:
            xs = [p[0] for p in cell.vertices]
            ys = [p[1] for p in cell.vertices]
            bx0, bx1 = self._bx(min(xs)), self._bx(max(xs))
            by0, by1 = self._by(min(ys)), self._by(max(ys))
            for bx in range(bx0, bx1 + 1):
                for by in range(by0, by1 + 1):
                    self.buckets.setdefault((bx, by), []).append(cell.id)
        # per-cell edge tables for the containment test
        self._tables = []
        for cell in dm.cells:
            pts = np.asarray(cell.vertices, dtype=float)
            ex = np.roll(pts[:, 0], -1) - pts[:, 0]
            ey = np.roll(pts[:, 1], -1) - pts[:, 1]
            elen = np.hypot(ex, ey)
            elen[elen == 0.0] = 1.0
            self._tables.append((pts[:, 0], pts[:, 1], ex, ey, elen))

    def _bx(self, x: float) -> int:
        return min(self.nx - 1, max(0, int((x - self.x0) / self.sx)))

    def _by(self, y: float) -> int:
        return min(self.ny - 1, max(0, int((y - self.y0) / self.sy)))

    def candidates(self, p: Point) -> List[int]:
        return self.buckets.get((self._bx(p[0]), self._by(p[1])), [])

    def classify(self, cid: int, p: Point, eps: float) -> int:
        """+1 interior, 0 boundary band, -1 exterior."""
        ax, ay, ex, ey, elen = self._tables[cid]
        d = (ex * (p[1] - ay) - ey * (p[0] - ax)) / elen
        if (d < -eps).any():
            return -1
        return 0 if (d <= eps).any() else 1

    def locate(self, p: Point) -> Tuple[int, bool]:
        """(cell id, on_boundary); boundary points go to the lowest cell id."""
        boundary_hit = None
        for cid in sorted(self.candidates(p)):
            c = self.classify(cid, p, self.dm.eps)
            if c > 0:
                return cid, False
            if c == 0 and boundary_hit is None:
                boundary_hit = cid
        if boundary_hit is not None:
            return boundary_hit, True
        raise OutsideFreeSpaceError(f"point {p} is not in free space")


def locate(dm: DissectionMap, p: Point, index: Optional[CellIndex] = None) -> int:
    """Containing cell id; points on a cutline resolve to the lower id."""
    idx = index or runtime(dm).index
    return idx.locate(p)[0]


# ---------------------------------------------------------------------------
# Path -> node sequence (trace) and node sequence -> path (realize)
# ---------------------------------------------------------------------------

class _SegmentTable:
    """Vectorized crossing queries against a fixed set of segments."""

    def __init__(self, segs: Sequence[Tuple[Point, Point]]):
        a = np.asarray([s[0] for s in segs], dtype=float).reshape(-1, 2)
        b = np.asarray([s[1] for s in segs], dtype=float).reshape(-1, 2)
        self.ax, self.ay = a[:, 0], a[:, 1]
        self.bx, self.by = b[:, 0], b[:, 1]
        self.min_x = np.minimum(self.ax, self.bx)
        self.max_x = np.maximum(self.ax, self.bx)
        self.min_y = np.minimum(self.ay, self.by)
        self.max_y = np.maximum(self.ay, self.by)

    def crossings(self, a: Point, b: Point, eps: float):
        """Proper crossings as (t, index) sorted along a->b.

        Returns None when any contact is degenerate (near-endpoint or
        collinear) so the caller can retry on perturbed input.
        """
        if self.ax.shape[0] == 0:
            return []
        ax, ay = a
        bx, by = b
        dx, dy = bx - ax, by - ay
        box = ~((min(ax, bx) > self.max_x + eps) | (max(ax, bx) < self.min_x - eps)
                | (min(ay, by) > self.max_y + eps) | (max(ay, by) < self.min_y - eps))
        if not box.any():
            return []
        c1 = dx * (self.ay - ay) - dy * (self.ax - ax)
        c2 = dx * (self.by - ay) - dy * (self.bx - ax)
        ex = self.bx - self.ax
        ey = self.by - self.ay
        c3 = ex * (ay - self.ay) - ey * (ax - self.ax)
        c4 = ex * (by - self.ay) - ey * (bx - self.ax)

        sep12 = (c1 * c2 > 0) & (np.minimum(np.abs(c1), np.abs(c2)) > eps)
        sep34 = (c3 * c4 > 0) & (np.minimum(np.abs(c3), np.abs(c4)) > eps)
        near_zero = (np.abs(c1) <= eps) | (np.abs(c2) <= eps) \
            | (np.abs(c3) <= eps) | (np.abs(c4) <= eps)
        if (box & near_zero & ~sep12 & ~sep34).any():
            return None
        hit = box & (c1 * c2 < 0) & (c3 * c4 < 0)
        ids = np.nonzero(hit)[0]
        if ids.size == 0:
            return []
        t = c3[ids] / (c3[ids] - c4[ids])
        order = np.argsort(t, kind="stable")
        t = t[order]
        ids = ids[order]
        if ids.size > 1 and (np.diff(t) < 1e-12).any():
            return None
        return list(zip(t.tolist(), ids.tolist()))


class _Runtime:
    """Lazily built per-map lookup structures shared by trace and locate."""

    def __init__(self, dm: DissectionMap):
        self.dm = dm
        self.index = CellIndex(dm)
        self.cutlines = _SegmentTable([(cl.a, cl.b) for cl in dm.cutlines])
        self.sides = [(cl.left_cell, cl.right_cell) for cl in dm.cutlines]
        self.walls = _SegmentTable(_wall_segments(dm))
        self.graph: Optional[TopologyGraph] = None

    def get_graph(self) -> TopologyGraph:
        if self.graph is None:
            self.graph = build_graph(self.dm)
        return self.graph


def _wall_segments(dm: DissectionMap) -> List[Tuple[Point, Point]]:
    """Cell edges that are free-space boundary (not part of any cutline)."""
    walls = []
    for cell in dm.cells:
        n = len(cell.vertices)
        for i in range(n):
            p, q = cell.vertices[i], cell.vertices[(i + 1) % n]
            interior = False
            for eid in cell.cutline_ids:
                cl = dm.cutlines[eid]
                if _on_segment(p, cl.a, cl.b, dm.eps) and _on_segment(q, cl.a, cl.b, dm.eps):
                    interior = True
                    break
            if not interior:
                walls.append((p, q))
    return walls


def _on_segment(p: Point, a: Point, b: Point, eps: float) -> bool:
    cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    seg_len = math.hypot(b[0] - a[0], b[1] - a[1]) or 1.0
    if abs(cr) / seg_len > eps:
        return False
    lo_x, hi_x = min(a[0], b[0]) - eps, max(a[0], b[0]) + eps
    lo_y, hi_y = min(a[1], b[1]) - eps, max(a[1], b[1]) + eps
    return lo_x <= p[0] <= hi_x and lo_y <= p[1] <= hi_y


def runtime(dm: DissectionMap) -> _Runtime:
    rt = dm.__dict__.get("_runtime")
    if rt is None:
        rt = _Runtime(dm)
        dm.__dict__["_runtime"] = rt
    return rt


_TRACE_ATTEMPTS = 6


def trace(dm: DissectionMap, polyline: Sequence[Point]) -> TopoPath:
    """Cell sequence a polyline passes through, with crossed cutlines.

    Vertices that sit exactly on cell borders are nudged a hair toward the
    centroid of their containing cell before the crossing sweep; contact
    that does not change the cell is never recorded. Raises
    OutsideFreeSpaceError (with the first offending segment index) when the
    polyline leaves the dissected space.
    """
    pts = [p for i, p in enumerate(polyline)
           if i == 0 or p != polyline[i - 1]]
    rt = runtime(dm)

    homes = []
    for i, p in enumerate(pts):
        try:
            homes.append(rt.index.locate(p))
        except OutsideFreeSpaceError as exc:
            raise OutsideFreeSpaceError(str(exc), segment=max(0, i - 1)) from None

    scale = math.hypot(dm.bounds[2] - dm.bounds[0], dm.bounds[3] - dm.bounds[1])
    for attempt in range(_TRACE_ATTEMPTS):
        work = _nudged(dm, pts, homes, scale, attempt)
        result = _sweep(rt, work, [h[0] for h in homes])
        if result is not None:
            if isinstance(result, OutsideFreeSpaceError):
                raise result
            return result
    raise OutsideFreeSpaceError("could not resolve a degenerate crossing", segment=0)


def _nudged(dm, pts, homes, scale, attempt):
    amt = 1e-7 * scale * (attempt + 1)
    out = []
    for p, (cid, on_boundary) in zip(pts, homes):
        if not on_boundary and attempt == 0:
            out.append(p)
            continue
        c = dm.cells[cid].centroid
        d = dist(p, c)
        if d <= dm.eps:
            out.append(p)
            continue
        t = min(amt / d, 0.5)
        out.append(lerp(p, c, t))
    return out


def _sweep(rt: _Runtime, pts, home_cells):
    """One crossing sweep; None means retry on nudged input."""
    eps = rt.dm.eps
    cur = home_cells[0]
    nodes = [cur]
    edges: List[int] = []
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        wall_hits = rt.walls.crossings(a, b, eps)
        if wall_hits is None:
            return None
        if wall_hits:
            return OutsideFreeSpaceError("polyline leaves free space", segment=i)
        crossings = rt.cutlines.crossings(a, b, eps)
        if crossings is None:
            return None  # degenerate contact; caller retries with a nudge
        for _, eid in crossings:
            la, lb = rt.sides[eid]
            if cur == la:
                cur = lb
            elif cur == lb:
                cur = la
            else:
                return None  # crossing inconsistent with current cell
            nodes.append(cur)
            edges.append(eid)
        if cur != home_cells[i + 1]:
            return None
    return TopoPath(tuple(nodes), tuple(edges))


def resolve_edges(graph: TopologyGraph, path: TopoPath) -> TopoPath:
    """Fill in edge ids for a bare node sequence (lowest cutline id wins)."""
    if path.edges is not None:
        return path
    edges = []
    for a, b in zip(path.nodes, path.nodes[1:]):
        between = graph.edges_between(a, b)
        if not between:
            raise ValueError(f"nodes {a},{b} are not adjacent")
        edges.append(min(between))
    return TopoPath(path.nodes, tuple(edges))


def realize(dm: DissectionMap, path: TopoPath,
            graph: Optional[TopologyGraph] = None) -> List[Point]:
    """Canonical polyline for a node walk: centroid, cutline midpoint,
    centroid, ... A single-node walk realizes as its cell centroid."""
    if len(path.nodes) == 1:
        return [dm.cells[path.nodes[0]].centroid]
    p = path
    if p.edges is None:
        if graph is None:
            graph = runtime(dm).get_graph()
        p = resolve_edges(graph, p)
    pts = [dm.cells[p.nodes[0]].centroid]
    for k, eid in enumerate(p.edges):
        cl = dm.cutlines[eid]
        if {cl.left_cell, cl.right_cell} != {p.nodes[k], p.nodes[k + 1]}:
            raise ValueError(f"edge {eid} does not join nodes {p.nodes[k]},{p.nodes[k+1]}")
        pts.append(cl.point_at(0.5))
        pts.append(dm.cells[p.nodes[k + 1]].centroid)
    return pts


# ---------------------------------------------------------------------------
# Reduction, equality, groupoid operations
# ---------------------------------------------------------------------------

def reduce_path(path: TopoPath) -> TopoPath:
    """Canonical representative: collapse every (x, x) and (x, y, x) window.

    A single stack pass is enough; the result does not depend on the
    order contractions are applied in. Edge ids ride along when present
    and are dropped with the window they belong to.
    """
    has_edges = path.edges is not None
    stack: List[Tuple[int, Optional[int]]] = []
    for i, node in enumerate(path.nodes):
        edge = path.edges[i - 1] if has_edges and i > 0 else None
        stack.append((node, edge))
        while True:
            if len(stack) >= 2 and stack[-1][0] == stack[-2][0]:
                stack.pop()
            elif len(stack) >= 3 and stack[-1][0] == stack[-3][0]:
                stack.pop()
                stack.pop()
            else:
                break
    nodes = tuple(n for n, _ in stack)
    edges = tuple(e for _, e in stack[1:]) if has_edges else None
    return TopoPath(nodes, edges)


def is_no_rollback(path: TopoPath) -> bool:
    ns = path.nodes
    for i in range(len(ns) - 1):
        if ns[i] == ns[i + 1]:
            return False
    for i in range(len(ns) - 2):
        if ns[i] == ns[i + 2]:
            return False
    return True


def homotopic(c1: TopoPath, c2: TopoPath) -> bool:
    """Equality of reduced sequences; defined only for shared endpoints.

    Which cutline was crossed is deliberately ignored: the contraction
    rule is stated on node sequences, so parallel cutlines between one
    cell pair do not split a class.
    """
    if c1.start != c2.start or c1.end != c2.end:
        raise ValueError("codes must share start and end nodes")
    return reduce_path(c1).nodes == reduce_path(c2).nodes


def concat(f: TopoPath, g: TopoPath) -> TopoPath:
    """Walk product: append g after f, dropping the duplicated junction."""
    if f.end != g.start:
        raise ValueError("junction mismatch: f must end where g starts")
    nodes = f.nodes + g.nodes[1:]
    if f.edges is not None and g.edges is not None:
        return TopoPath(nodes, f.edges + g.edges)
    return TopoPath(nodes)


def invert(f: TopoPath) -> TopoPath:
    nodes = tuple(reversed(f.nodes))
    edges = tuple(reversed(f.edges)) if f.edges is not None else None
    return TopoPath(nodes, edges)
