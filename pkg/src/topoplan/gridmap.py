"""Occupancy-grid ingestion: free-space components to simple polygons.

Pipeline: load a PGM grid, flood-fill the free cells into 4-connected
components, trace each component's boundary loops on the cell-edge
lattice, simplify the loops with a conservative Douglas-Peucker pass,
and merge hole loops into the outer loop through zero-width keyhole
bridges so every component ends up as one (weakly) simple polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .geometry import (
    NONE,
    OVERLAP,
    PROPER,
    TOUCH,
    Point,
    point_in_polygon,
    seg_intersect,
    seg_point_distance,
    signed_area,
)


class GridFormatError(ValueError):
    """Malformed occupancy-grid payload."""


@dataclass
class OccupancyGrid:
    """Row-major byte grid; a cell is occupied when its value >= occ_threshold."""

    width: int
    height: int
    resolution: float
    cells: np.ndarray  # shape (height, width), uint8
    occ_threshold: int = 128

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.uint8).reshape(self.height, self.width)
        if self.resolution <= 0:
            raise GridFormatError("resolution must be positive")

    @property
    def free_mask(self) -> np.ndarray:
        return self.cells < self.occ_threshold

    def free_cell_count(self) -> int:
        return int(self.free_mask.sum())


@dataclass
class BoundaryLoop:
    """Closed lattice loop (first point equals last), scaled to map units."""

    points: List[Point]
    kind: str  # "outer" | "hole"

    def signed_area(self) -> float:
        return signed_area(self.points[:-1])


@dataclass
class Component:
    """One 4-connected free region: outer loop plus hole loops."""

    id: int
    outer: BoundaryLoop
    holes: List[BoundaryLoop]
    free_cells: int


@dataclass
class SimplePolygon:
    """Weakly simple CCW polygon for one free component.

    ``vertex_ids`` assigns every boundary occurrence an id; the duplicated
    endpoints of a keyhole bridge share the id of the vertex they clone,
    which is what lets downstream passes pair up the coincident bridge
    edges. ``bridges`` lists those (outer_id, hole_id) pairs.
    """

    vertices: List[Point]
    provenance: int
    vertex_ids: List[int] = field(default_factory=list)
    bridge_flags: List[bool] = field(default_factory=list)
    bridges: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.vertex_ids:
            self.vertex_ids = list(range(len(self.vertices)))
        if not self.bridge_flags:
            self.bridge_flags = [False] * len(self.vertices)

    def edge_count(self) -> int:
        return len(self.vertices)

    def area(self) -> float:
        return signed_area(self.vertices)


@dataclass
class IngestConfig:
    epsilon_fit: float = 2.0  # map units; boundary fit bound
    occ_threshold: int = 128


# ---------------------------------------------------------------------------
# PGM parsing
# ---------------------------------------------------------------------------

def load_grid(data: bytes, fmt: str = "pgm", resolution: float = 1.0,
              occ_threshold: int = 128) -> OccupancyGrid:
    """Parse a P2 (ASCII) or P5 (binary) PGM payload into an OccupancyGrid."""
    if fmt != "pgm":
        raise GridFormatError(f"unsupported format: {fmt!r}")
    magic, fields_, pos = _read_pgm_header(data)
    width, height, maxval = fields_
    if width <= 0 or height <= 0:
        raise GridFormatError("non-positive grid dimensions")
    if width * height > 64_000_000:
        raise GridFormatError("dimension overflow")
    if not (0 < maxval < 65536):
        raise GridFormatError("bad maxval")
    n = width * height
    if magic == b"P5":
        if maxval > 255:
            raise GridFormatError("16-bit PGM not supported")
        raw = data[pos:pos + n]
        if len(raw) < n:
            raise GridFormatError("short read")
        cells = np.frombuffer(raw, dtype=np.uint8, count=n)
    else:  # P2
        tokens = data[pos:].split()
        if len(tokens) < n:
            raise GridFormatError("short read")
        try:
            cells = np.array([int(t) for t in tokens[:n]], dtype=np.int64)
        except ValueError as exc:
            raise GridFormatError("non-numeric sample") from exc
        if cells.min() < 0 or cells.max() > maxval:
            raise GridFormatError("sample out of range")
        cells = cells.astype(np.uint8)
    return OccupancyGrid(width, height, resolution, cells, occ_threshold)


def _read_pgm_header(data: bytes):
    if data[:2] not in (b"P2", b"P5"):
        raise GridFormatError("not a PGM payload")
    magic = data[:2]
    fields_: List[int] = []
    pos = 2
    while len(fields_) < 3:
        if pos >= len(data):
            raise GridFormatError("truncated header")
        c = data[pos:pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise GridFormatError("truncated header")
            pos = nl + 1
        elif c.isdigit():
            end = pos
            while end < len(data) and data[end:end + 1].isdigit():
                end += 1
            fields_.append(int(data[pos:end]))
            pos = end
        else:
            raise GridFormatError("malformed header")
    pos += 1  # single whitespace after maxval
    return magic, tuple(fields_), pos


def dump_pgm(grid: OccupancyGrid) -> bytes:
    header = f"P5\n{grid.width} {grid.height}\n255\n".encode()
    return header + grid.cells.tobytes()


# ---------------------------------------------------------------------------
# Component extraction and boundary tracing
# ---------------------------------------------------------------------------

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def extract_components(grid: OccupancyGrid) -> List[Component]:
    """Flood-fill free cells (4-connected) and trace each region's loops.

    Loops run on the integer cell-edge lattice and are scaled by the grid
    resolution. The outer loop of each component is CCW (positive area),
    holes are CW; the free region always lies on the left of the traversal.
    """
    free = grid.free_mask
    labels, count = ndimage.label(free, structure=_FOUR_CONN)
    components = []
    for comp_id in range(1, count + 1):
        mask = labels == comp_id
        loops = _trace_loops(mask)
        outer = [lp for lp in loops if lp.kind == "outer"]
        holes = [lp for lp in loops if lp.kind == "hole"]
        if len(outer) != 1:
            raise RuntimeError(f"component {comp_id}: expected 1 outer loop, got {len(outer)}")
        if grid.resolution != 1.0:
            for lp in loops:
                lp.points = [(x * grid.resolution, y * grid.resolution) for x, y in lp.points]
        components.append(Component(comp_id - 1, outer[0], holes, int(mask.sum())))
    return components


def _trace_loops(mask: np.ndarray) -> List[BoundaryLoop]:
    """Stitch the free/occupied interface edges of one region into loops.

    Each free cell emits one directed edge per exposed side, oriented so
    the cell is on the left. At lattice corners where the region touches
    itself diagonally, the walk takes the sharpest left turn, which keeps
    diagonally-adjacent obstacles connected (8-connected obstacles).
    """
    h, w = mask.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask
    core = padded[1:-1, 1:-1]

    edges: dict = {}

    def add_edges(exposed, d_start, d_end):
        rr, cc = np.nonzero(exposed)
        for r, c in zip(rr.tolist(), cc.tolist()):
            start = (c + d_start[0], r + d_start[1])
            end = (c + d_end[0], r + d_end[1])
            edges.setdefault(start, []).append(end)

    # neighbor above missing -> edge (c,r) -> (c+1,r); right -> (c+1,r)->(c+1,r+1)
    # below -> (c+1,r+1)->(c,r+1); left -> (c,r+1)->(c,r). Free cell stays on
    # the left, so outer loops come out with positive signed area.
    add_edges(core & ~padded[:-2, 1:-1], (0, 0), (1, 0))
    add_edges(core & ~padded[1:-1, 2:], (1, 0), (1, 1))
    add_edges(core & ~padded[2:, 1:-1], (1, 1), (0, 1))
    add_edges(core & ~padded[1:-1, :-2], (0, 1), (0, 0))

    for outs in edges.values():
        outs.sort()

    loops: List[BoundaryLoop] = []
    starts = sorted(edges.keys())
    for start in starts:
        while edges.get(start):
            loop = [start]
            prev_dir = None
            cur = start
            while True:
                outs = edges.get(cur)
                if not outs:
                    raise RuntimeError("boundary stitching failed: dead end")
                if prev_dir is None or len(outs) == 1:
                    nxt = outs.pop(0)
                else:
                    # sharpest left turn: maximize cross(prev_dir, out_dir)
                    best_i = 0
                    best_cross = -2
                    for i, cand in enumerate(outs):
                        dx, dy = cand[0] - cur[0], cand[1] - cur[1]
                        cr = prev_dir[0] * dy - prev_dir[1] * dx
                        if cr > best_cross:
                            best_cross = cr
                            best_i = i
                    nxt = outs.pop(best_i)
                prev_dir = (nxt[0] - cur[0], nxt[1] - cur[1])
                loop.append(nxt)
                cur = nxt
                if cur == start:
                    break
            pts = _collapse_collinear_steps(loop)
            area = signed_area(pts[:-1])
            loops.append(BoundaryLoop([(float(x), float(y)) for x, y in pts],
                                      "outer" if area > 0 else "hole"))
    return loops


def _collapse_collinear_steps(loop):
    """Drop intermediate points of straight unit-step runs (closed loop)."""
    pts = loop[:-1]
    n = len(pts)
    keep = []
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if (b[0] - a[0]) * (c[1] - a[1]) != (b[1] - a[1]) * (c[0] - a[0]):
            keep.append(b)
    if len(keep) < 3:
        keep = pts
    return keep + [keep[0]]


# ---------------------------------------------------------------------------
# Loop simplification (conservative Douglas-Peucker)
# ---------------------------------------------------------------------------

def simplify_loop(loop: BoundaryLoop, epsilon_fit: float,
                  grid: Optional[OccupancyGrid] = None) -> BoundaryLoop:
    """Douglas-Peucker on a closed loop, bounded by ``epsilon_fit``.

    The closed loop is split at two extremal points and each open chain is
    simplified; every original vertex stays within epsilon_fit of the
    result. When a grid is supplied, simplified edges that cut through the
    interior of an occupied cell are re-split at the worst offending
    original vertex so the polygon never leaves free space. A final pass
    re-splits any pair of edges that would make the loop self-intersect.
    """
    pts = loop.points[:-1]
    n = len(pts)
    if n < 3:
        raise ValueError("loop degenerated below 3 vertices")
    arr = np.asarray(pts, dtype=float)

    i0 = int(np.lexsort((arr[:, 1], arr[:, 0]))[0])
    d = np.hypot(arr[:, 0] - arr[i0, 0], arr[:, 1] - arr[i0, 1])
    i1 = int(np.argmax(d))
    if i1 == i0:
        i1 = (i0 + n // 2) % n

    lo, hi = sorted((i0, i1))
    chain_a = list(range(lo, hi + 1))
    chain_b = list(range(hi, n)) + list(range(0, lo + 1))

    keep = set()
    for chain in (chain_a, chain_b):
        keep.update(_dp_chain(arr, chain, epsilon_fit))

    kept = sorted(keep)
    kept = _ensure_three_vertices(arr, kept)
    if grid is not None:
        kept = _enforce_free_space(arr, kept, grid)
    kept = _enforce_simple(arr, kept)

    if len(kept) < 3 or abs(signed_area([tuple(arr[i]) for i in kept])) < 1e-12:
        raise ValueError("loop degenerated below 3 vertices")
    out = [tuple(arr[i]) for i in kept]
    return BoundaryLoop(out + [out[0]], loop.kind)


def _ensure_three_vertices(arr: np.ndarray, kept: List[int]) -> List[int]:
    """A closed loop needs >= 3 non-collinear vertices even at huge epsilon."""
    kept = list(kept)
    n = len(arr)
    for _ in range(n):
        ring = [tuple(arr[i]) for i in kept]
        if len(kept) >= 3 and abs(signed_area(ring)) > 1e-12:
            return kept
        best = None
        m = len(kept)
        for k in range(m):
            i, j = kept[k], kept[(k + 1) % m]
            span = list(range(i + 1, j)) if j > i else list(range(i + 1, n)) + list(range(0, j))
            if not span:
                continue
            dmax, imax = _max_deviation(arr[np.array(span)], arr[i], arr[j])
            if best is None or dmax > best[0]:
                best = (dmax, span[imax])
        if best is None or best[0] <= 1e-12:
            return kept
        kept = sorted(set(kept + [best[1]]))
    return kept


def _dp_chain(arr: np.ndarray, chain: Sequence[int], eps: float) -> List[int]:
    keep = [chain[0], chain[-1]]
    stack = [(0, len(chain) - 1)]
    while stack:
        a, b = stack.pop()
        if b - a < 2:
            continue
        pa, pb = arr[chain[a]], arr[chain[b]]
        idx = np.array(chain[a + 1:b])
        dmax, imax = _max_deviation(arr[idx], pa, pb)
        if dmax > eps:
            split = a + 1 + imax
            keep.append(chain[split])
            stack.append((a, split))
            stack.append((split, b))
    return keep


def _max_deviation(points: np.ndarray, a, b) -> Tuple[float, int]:
    ab = b - a
    den = float(ab @ ab)
    if den == 0.0:
        d = np.hypot(points[:, 0] - a[0], points[:, 1] - a[1])
    else:
        t = np.clip(((points - a) @ ab) / den, 0.0, 1.0)
        proj = a + t[:, None] * ab
        d = np.hypot(points[:, 0] - proj[:, 0], points[:, 1] - proj[:, 1])
    i = int(np.argmax(d))
    return float(d[i]), i


def _edge_hits_occupied(a, b, grid: OccupancyGrid) -> bool:
    """True if the open segment a-b passes through an occupied cell interior.

    Runs in lattice units (cell size 1). Cells are tested by clipping the
    segment to the cell square and checking that a genuine sub-segment
    with an interior midpoint remains, so edges that merely run along a
    cell border do not count.
    """
    occ = ~grid.free_mask
    res = grid.resolution
    ax, ay = a[0] / res, a[1] / res
    bx, by = b[0] / res, b[1] / res
    c_lo = max(0, int(math.floor(min(ax, bx))) - 1)
    c_hi = min(grid.width - 1, int(math.floor(max(ax, bx))) + 1)
    r_lo = max(0, int(math.floor(min(ay, by))) - 1)
    r_hi = min(grid.height - 1, int(math.floor(max(ay, by))) + 1)
    dx, dy = bx - ax, by - ay
    for r in range(r_lo, r_hi + 1):
        row = occ[r]
        for c in range(c_lo, c_hi + 1):
            if not row[c]:
                continue
            t0, t1 = 0.0, 1.0
            ok = True
            for p, dd, lo, hi in ((ax, dx, c, c + 1), (ay, dy, r, r + 1)):
                if abs(dd) < 1e-12:
                    if p < lo or p > hi:
                        ok = False
                        break
                else:
                    ta, tb = (lo - p) / dd, (hi - p) / dd
                    if ta > tb:
                        ta, tb = tb, ta
                    t0, t1 = max(t0, ta), min(t1, tb)
            if not ok or t1 - t0 <= 1e-9:
                continue
            tm = 0.5 * (t0 + t1)
            mx, my = ax + tm * dx, ay + tm * dy
            if c + 1e-9 < mx < c + 1 - 1e-9 and r + 1e-9 < my < r + 1 - 1e-9:
                return True
    return False


def _enforce_free_space(arr: np.ndarray, kept: List[int], grid: OccupancyGrid) -> List[int]:
    kept = list(kept)
    changed = True
    while changed:
        changed = False
        n = len(kept)
        for k in range(n):
            i, j = kept[k], kept[(k + 1) % n]
            if not _edge_hits_occupied(arr[i], arr[j], grid):
                continue
            span = list(range(i + 1, j)) if j > i else list(range(i + 1, len(arr))) + list(range(0, j))
            if not span:
                continue
            _, imax = _max_deviation(arr[np.array(span)], arr[i], arr[j])
            kept.append(span[imax])
            kept = sorted(set(kept))
            changed = True
            break
    return kept


def _enforce_simple(arr: np.ndarray, kept: List[int]) -> List[int]:
    kept = list(kept)
    for _ in range(len(arr)):
        n = len(kept)
        bad = None
        for u in range(n):
            a, b = kept[u], kept[(u + 1) % n]
            for v in range(u + 1, n):
                if v == u or (v + 1) % n == u or (u + 1) % n == v:
                    continue
                c, d = kept[v], kept[(v + 1) % n]
                kind, _ = seg_intersect(tuple(arr[a]), tuple(arr[b]),
                                        tuple(arr[c]), tuple(arr[d]))
                if kind in (PROPER, OVERLAP):
                    bad = (a, b)
                    break
            if bad:
                break
        if bad is None:
            return kept
        i, j = bad
        span = list(range(i + 1, j)) if j > i else list(range(i + 1, len(arr))) + list(range(0, j))
        if not span:
            return kept
        _, imax = _max_deviation(arr[np.array(span)], arr[i], arr[j])
        kept = sorted(set(kept + [span[imax]]))
    return kept


# ---------------------------------------------------------------------------
# Keyhole hole merging
# ---------------------------------------------------------------------------

def merge_holes(outer: BoundaryLoop, holes: Sequence[BoundaryLoop],
                provenance: int = 0, eps: float = 1e-9) -> SimplePolygon:
    """Join hole loops to the outer loop with zero-width keyhole bridges.

    Holes are processed sorted by their leftmost vertex; each is attached
    along the shortest mutually visible vertex pair against the current
    boundary and the not-yet-merged holes. The duplicated bridge vertices
    share ids with their originals so the two coincident bridge edges can
    be paired up later.
    """
    if outer.signed_area() <= 0:
        raise ValueError("outer loop must be CCW")
    verts: List[Point] = list(outer.points[:-1])
    ids = list(range(len(verts)))
    flags = [False] * len(verts)
    next_id = len(verts)
    bridges: List[Tuple[int, int]] = []

    pending = sorted(holes, key=lambda h: min(h.points[:-1]))
    for hi, hole in enumerate(pending):
        hpts = hole.points[:-1]
        if signed_area(hpts) >= 0:
            hpts = hpts[::-1]  # holes wind CW
        other_edges = []
        for rest in pending[hi + 1:]:
            rp = rest.points[:-1]
            other_edges.extend((rp[k], rp[(k + 1) % len(rp)]) for k in range(len(rp)))

        pair = _find_bridge(verts, hpts, other_edges, eps)
        if pair is None:
            raise RuntimeError("no visible keyhole bridge found")
        bi, hj = pair  # boundary vertex index, hole vertex index

        hole_ids = list(range(next_id, next_id + len(hpts)))
        next_id += len(hpts)
        rot = hpts[hj:] + hpts[:hj]
        rot_ids = hole_ids[hj:] + hole_ids[:hj]

        new_verts = verts[:bi + 1] + rot + [rot[0]] + [verts[bi]] + verts[bi + 1:]
        new_ids = ids[:bi + 1] + rot_ids + [rot_ids[0]] + [ids[bi]] + ids[bi + 1:]
        new_flags = flags[:bi + 1] + [False] * len(rot) + [True, True] + flags[bi + 1:]
        new_flags[bi] = True
        new_flags[bi + 1] = True
        verts, ids, flags = new_verts, new_ids, new_flags
        bridges.append((ids[bi], rot_ids[0]))

    poly = SimplePolygon(verts, provenance, ids, flags, bridges)
    if poly.area() <= 0:
        raise RuntimeError("merged polygon lost positive orientation")
    return poly


def _find_bridge(boundary: List[Point], hole: List[Point], other_edges, eps: float):
    cands = []
    for j, hv in enumerate(hole):
        for i, bv in enumerate(boundary):
            d2 = (hv[0] - bv[0]) ** 2 + (hv[1] - bv[1]) ** 2
            cands.append((d2, j, i))
    cands.sort()
    nb = len(boundary)
    nh = len(hole)
    for d2, j, i in cands:
        if d2 <= eps * eps:
            continue
        hv, bv = hole[j], boundary[i]
        if _bridge_visible(bv, hv, boundary, eps) and \
           _bridge_visible(bv, hv, hole, eps) and \
           _clear_of_edges(bv, hv, other_edges, eps):
            return i, j
    return None


def _bridge_visible(a: Point, b: Point, ring: List[Point], eps: float) -> bool:
    n = len(ring)
    for k in range(n):
        c, d = ring[k], ring[(k + 1) % n]
        kind, pt = seg_intersect(a, b, c, d, eps)
        if kind == NONE:
            continue
        if kind in (PROPER, OVERLAP):
            return False
        # touching is fine only exactly at the candidate endpoints, at a
        # ring vertex (otherwise the bridge grazes the middle of an edge)
        if pt is None:
            return False
        if not (_close(pt, a, eps) or _close(pt, b, eps)):
            return False
        if not (_close(pt, c, eps) or _close(pt, d, eps)):
            return False
    return True


def _clear_of_edges(a: Point, b: Point, edges, eps: float) -> bool:
    for c, d in edges:
        kind, _ = seg_intersect(a, b, c, d, eps)
        if kind != NONE:
            return False
    return True


def _close(p: Point, q: Point, eps: float) -> bool:
    return abs(p[0] - q[0]) <= eps and abs(p[1] - q[1]) <= eps


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

def component_polygons(grid: OccupancyGrid, cfg: IngestConfig) -> List[SimplePolygon]:
    """Grid -> one weakly simple polygon per free-space component."""
    polys = []
    for comp in extract_components(grid):
        outer = simplify_loop(comp.outer, cfg.epsilon_fit, grid)
        holes = [simplify_loop(h, cfg.epsilon_fit, grid) for h in comp.holes]
        outer, holes = _resolve_loop_crossings(outer, holes, comp, grid)
        polys.append(merge_holes(outer, holes, comp.id))
    return polys


def _resolve_loop_crossings(outer: BoundaryLoop, holes: List[BoundaryLoop],
                            comp: Component, grid: OccupancyGrid
                            ) -> Tuple[BoundaryLoop, List[BoundaryLoop]]:
    """Re-simplify with a tighter bound if simplified loops cross each other.

    Separate loops of one component never properly cross when traced;
    aggressive simplification of facing boundaries across a narrow corridor
    can make them cross. Halving the deviation (down to the raw trace)
    always terminates. Point contacts are left alone; downstream stages
    treat coincident vertices as touching boundaries.
    """
    loops = [outer] + holes
    raw = [comp.outer] + comp.holes
    eps_cur: List[Optional[float]] = [None] * len(loops)

    def crossing() -> Optional[Tuple[int, int]]:
        for a in range(len(loops)):
            for b in range(a + 1, len(loops)):
                pa, pb = loops[a].points, loops[b].points
                for i in range(len(pa) - 1):
                    for j in range(len(pb) - 1):
                        kind, _ = seg_intersect(pa[i], pa[i + 1], pb[j], pb[j + 1])
                        if kind in (PROPER, OVERLAP):
                            return a, b
        return None

    for _ in range(64):
        hit = crossing()
        if hit is None:
            break
        for idx in hit:
            cur = eps_cur[idx]
            base = _loop_deviation(raw[idx], loops[idx])
            nxt = (cur if cur is not None else base) / 2.0
            eps_cur[idx] = nxt
            if nxt < 1e-9:
                loops[idx] = raw[idx]
            else:
                loops[idx] = simplify_loop(raw[idx], nxt, grid)
    return loops[0], loops[1:]


def _loop_deviation(raw: BoundaryLoop, simplified: BoundaryLoop) -> float:
    worst = 0.0
    spts = simplified.points
    for p in raw.points[:-1]:
        best = min(seg_point_distance(spts[i], spts[i + 1], p) for i in range(len(spts) - 1))
        worst = max(worst, best)
    return max(worst, 1e-6)


def hole_representatives(grid: OccupancyGrid) -> List[Point]:
    """One interior point per enclosed obstacle, for crossing-word oracles.

    An obstacle counts as enclosed when its 8-connected occupied region
    does not touch the grid border (border-touching occupied regions are
    bays of the outer boundary, not holes).
    """
    occ = ~grid.free_mask
    labels, count = ndimage.label(occ, structure=np.ones((3, 3), dtype=bool))
    reps = []
    for k in range(1, count + 1):
        rr, cc = np.nonzero(labels == k)
        if rr.min() == 0 or cc.min() == 0 or rr.max() == grid.height - 1 or cc.max() == grid.width - 1:
            continue
        i = len(rr) // 2
        reps.append(((cc[i] + 0.5) * grid.resolution, (rr[i] + 0.5) * grid.resolution))
    return reps
