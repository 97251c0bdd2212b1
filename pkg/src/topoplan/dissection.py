"""Convex dissection of a simple polygon into cells joined by cutlines.

Reflex vertices are resolved one at a time: pop a reflex vertex, collect
the vertices it can see inside its resolving cone, cut to the candidate
that splits its interior angle most evenly, and queue any corner that is
still reflex in a sub-polygon. Cut endpoints are always original polygon
vertices, so the dissection never invents geometry.

The coincident edge pairs left behind by keyhole bridges are registered
as cutlines between the two flanking cells: the slit has zero width and
free space is continuous across it, so treating it as a wall would
invent a barrier that does not exist in the map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (
    NONE,
    OVERLAP,
    PROPER,
    TOUCH,
    Point,
    bbox,
    bbox_diagonal,
    is_convex,
    orient,
    seg_intersect,
    signed_area,
    vertex_centroid,
)
from .gridmap import SimplePolygon


class DissectionError(RuntimeError):
    """Dissection failed an internal consistency guarantee."""


@dataclass
class Cutline:
    """Shared border between two cells; endpoints are original vertices."""

    id: int
    a: Point
    b: Point
    left_cell: int
    right_cell: int
    from_bridge: bool = False

    def cells(self) -> Tuple[int, int]:
        return (self.left_cell, self.right_cell)

    def point_at(self, t: float) -> Point:
        return (self.a[0] + (self.b[0] - self.a[0]) * t,
                self.a[1] + (self.b[1] - self.a[1]) * t)

    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])


@dataclass
class ConvexCell:
    id: int
    vertices: List[Point]  # CCW
    cutline_ids: List[int] = field(default_factory=list)
    centroid: Point = (0.0, 0.0)

    def area(self) -> float:
        return signed_area(self.vertices)


@dataclass
class DissectionMap:
    cells: List[ConvexCell]
    cutlines: List[Cutline]
    component: int
    eps: float
    bounds: Tuple[float, float, float, float]

    def cell(self, cid: int) -> ConvexCell:
        return self.cells[cid]

    def cutline(self, eid: int) -> Cutline:
        return self.cutlines[eid]

    def total_area(self) -> float:
        return sum(c.area() for c in self.cells)


# ---------------------------------------------------------------------------
# Reflex vertices, cones, visibility
# ---------------------------------------------------------------------------

def find_concave(vertices: Sequence[Point], eps: float = 0.0) -> List[int]:
    """Indices of reflex vertices of a CCW ring (right turns beyond eps)."""
    n = len(vertices)
    out = []
    for i in range(n):
        if orient(vertices[i - 1], vertices[i], vertices[(i + 1) % n], eps) < 0:
            out.append(i)
    return out


def _interior_angles(vertices, i, w) -> Tuple[float, float]:
    """(interior angle at vertex i, CCW angle from the outgoing edge to w)."""
    n = len(vertices)
    v = vertices[i]
    pn = vertices[(i + 1) % n]
    pp = vertices[i - 1]
    phi_n = math.atan2(pn[1] - v[1], pn[0] - v[0])
    phi_p = math.atan2(pp[1] - v[1], pp[0] - v[0])
    phi_d = math.atan2(w[1] - v[1], w[0] - v[0])
    two_pi = 2.0 * math.pi
    theta = (phi_p - phi_n) % two_pi
    t1 = (phi_d - phi_n) % two_pi
    return theta, t1


def _in_wedge(vertices, i, p) -> bool:
    """Direction from vertex i toward p lies strictly inside the interior
    wedge at i. Distinguishes coincident occurrences of one coordinate
    (keyhole duplicates), whose wedges partition the plane angle."""
    theta, t1 = _interior_angles(vertices, i, p)
    return 1e-12 < t1 < theta - 1e-12


def _in_resolving_cone(vertices, i, j, eps) -> bool:
    """True if cutting vertex i to vertex j removes the reflex angle at i.

    The direction must point strictly into the interior wedge at both
    endpoints, and both sub-angles the cut creates at i must pass the same
    non-reflex test that find_concave applies.
    """
    n = len(vertices)
    v, w = vertices[i], vertices[j]
    if not _in_wedge(vertices, i, w) or not _in_wedge(vertices, j, v):
        return False
    return (orient(vertices[i - 1], v, w, eps) >= 0
            and orient(w, v, vertices[(i + 1) % n], eps) >= 0)


class _EdgeArrays:
    """Vectorized edge table for segment-vs-boundary queries."""

    def __init__(self, vertices: Sequence[Point]):
        pts = np.asarray(vertices, dtype=float)
        self.n = len(vertices)
        self.ax = pts[:, 0]
        self.ay = pts[:, 1]
        self.bx = np.roll(pts[:, 0], -1)
        self.by = np.roll(pts[:, 1], -1)
        self.min_x = np.minimum(self.ax, self.bx)
        self.max_x = np.maximum(self.ax, self.bx)
        self.min_y = np.minimum(self.ay, self.by)
        self.max_y = np.maximum(self.ay, self.by)

    def segment_blocked(self, vertices, i, j, eps) -> bool:
        """True if segment vertex_i - vertex_j may not serve as a cut.

        Proper crossings and collinear overlaps with any non-incident edge
        block the cut. Grazing contact is allowed only at the segment's own
        endpoints (the polygon may touch itself there); contact anywhere in
        the segment interior means it threads a pinch point and is refused.
        """
        v = vertices[i]
        w = vertices[j]
        vx, vy = v
        wx, wy = w
        dx, dy = wx - vx, wy - vy

        c1 = dx * (self.ay - vy) - dy * (self.ax - vx)
        c2 = dx * (self.by - vy) - dy * (self.bx - vx)
        ex = self.bx - self.ax
        ey = self.by - self.ay
        c3 = ex * (vy - self.ay) - ey * (vx - self.ax)
        c4 = ex * (wy - self.ay) - ey * (wx - self.ax)

        z1 = np.abs(c1) <= eps
        z2 = np.abs(c2) <= eps
        z3 = np.abs(c3) <= eps
        z4 = np.abs(c4) <= eps

        skip = np.zeros(self.n, dtype=bool)
        for k in (i - 1, i, j - 1, j):
            skip[k % self.n] = True

        box = ~((np.minimum(vx, wx) > self.max_x + eps)
                | (np.maximum(vx, wx) < self.min_x - eps)
                | (np.minimum(vy, wy) > self.max_y + eps)
                | (np.maximum(vy, wy) < self.min_y - eps))
        active = box & ~skip

        proper = active & (c1 * c2 < 0) & (c3 * c4 < 0) & ~(z1 | z2 | z3 | z4)
        if proper.any():
            return True

        degen = active & (z1 | z2 | z3 | z4)
        if not degen.any():
            return False
        for k in np.nonzero(degen)[0]:
            a = (self.ax[k], self.ay[k])
            b = (self.bx[k], self.by[k])
            kind, pt = seg_intersect(v, w, a, b, eps)
            if kind == NONE:
                continue
            if kind in (PROPER, OVERLAP):
                return True
            if pt is None:
                return True
            near_v = abs(pt[0] - vx) <= eps and abs(pt[1] - vy) <= eps
            near_w = abs(pt[0] - wx) <= eps and abs(pt[1] - wy) <= eps
            if not (near_v or near_w):
                return True
        return False


def viewable_points(vertices: Sequence[Point], v: int, eps: float = 0.0) -> List[int]:
    """All vertex indices the reflex vertex v can be cut to.

    A candidate must lie in the resolving cone of v and the open segment
    between them must stay inside the polygon.
    """
    n = len(vertices)
    if orient(vertices[v - 1], vertices[v], vertices[(v + 1) % n], eps) >= 0:
        raise ValueError("vertex is not reflex")
    edges = _EdgeArrays(vertices)
    out = []
    for j in range(n):
        if j == v or (j - v) % n == 1 or (v - j) % n == 1:
            continue
        if abs(vertices[j][0] - vertices[v][0]) <= eps and \
           abs(vertices[j][1] - vertices[v][1]) <= eps:
            continue
        if not _in_resolving_cone(vertices, v, j, eps):
            continue
        if not edges.segment_blocked(vertices, v, j, eps):
            out.append(j)
    return out


def weight_cut(vertices: Sequence[Point], v: int, candidates: Sequence[int],
               eps: float = 0.0) -> Tuple[int, List[int]]:
    """Pick the candidate that splits the reflex angle at v most evenly.

    Ties fall to the shorter cut, then the lower vertex index. Returns the
    chosen index plus the vertex indices that are reflex in a sub-polygon
    created by the cut (both occurrences of each endpoint are examined).
    """
    if not candidates:
        raise ValueError("no cut candidates")
    best = None
    for j in candidates:
        theta, t1 = _interior_angles(vertices, v, vertices[j])
        t2 = theta - t1
        ratio = min(t1, t2) / max(t1, t2)
        d2 = (vertices[j][0] - vertices[v][0]) ** 2 + (vertices[j][1] - vertices[v][1]) ** 2
        key = (-round(ratio, 9), d2, j)
        if best is None or key < best[0]:
            best = (key, j)
    j = best[1]
    i, k = min(v, j), max(v, j)
    n = len(vertices)
    new_reflex = []
    checks = (
        (vertices[k], vertices[i], vertices[(i + 1) % n], i),   # i inside ring i..k
        (vertices[k - 1], vertices[k], vertices[i], k),          # k inside ring i..k
        (vertices[i - 1], vertices[i], vertices[k], i),          # i inside ring k..i
        (vertices[i], vertices[k], vertices[(k + 1) % n], k),    # k inside ring k..i
    )
    for a, b, c, idx in checks:
        if orient(a, b, c, eps) < 0 and idx not in new_reflex:
            new_reflex.append(idx)
    return j, new_reflex


# ---------------------------------------------------------------------------
# Decomposition driver
# ---------------------------------------------------------------------------

@dataclass
class _SubPoly:
    pts: List[Point]
    occ: List[int]          # stable per boundary occurrence
    orig: List[int]         # original vertex index, for deterministic ties
    tags: List[tuple]       # edge i = pts[i] -> pts[i+1]


def check_weakly_simple(poly: SimplePolygon, eps: float) -> bool:
    """Pairwise edge check tolerating bridge twins and point contacts."""
    verts = poly.vertices
    ids = poly.vertex_ids
    n = len(verts)
    edges = _EdgeArrays(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        vx, vy = a
        wx, wy = b
        dx, dy = wx - vx, wy - vy
        c1 = dx * (edges.ay - vy) - dy * (edges.ax - vx)
        c2 = dx * (edges.by - vy) - dy * (edges.bx - vx)
        ex = edges.bx - edges.ax
        ey = edges.by - edges.ay
        c3 = ex * (vy - edges.ay) - ey * (vx - edges.ax)
        c4 = ex * (wy - edges.ay) - ey * (wx - edges.ax)
        box = ~((min(vx, wx) > edges.max_x + eps) | (max(vx, wx) < edges.min_x - eps)
                | (min(vy, wy) > edges.max_y + eps) | (max(vy, wy) < edges.min_y - eps))
        suspect = box.copy()
        suspect[[i, (i - 1) % n, (i + 1) % n]] = False
        idx = np.nonzero(suspect)[0]
        idx = idx[idx > i]
        for j in idx:
            if c1[j] * c2[j] > 0 and min(abs(c1[j]), abs(c2[j])) > eps:
                continue
            if c3[j] * c4[j] > 0 and min(abs(c3[j]), abs(c4[j])) > eps:
                continue
            c, d = verts[j], verts[(j + 1) % n]
            kind, _ = seg_intersect(a, b, c, d, eps)
            if kind == PROPER:
                return False
            if kind == OVERLAP:
                pair_i = frozenset((ids[i], ids[(i + 1) % n]))
                pair_j = frozenset((ids[j], ids[(j + 1) % n]))
                if pair_i != pair_j:
                    return False
    return True


def geom_eps(vertices: Sequence[Point]) -> float:
    return 1e-9 * bbox_diagonal(vertices)


def decompose(poly: SimplePolygon) -> DissectionMap:
    """Dissect a (weakly) simple CCW polygon into convex cells.

    Bridge-flagged reflex vertices are processed first so the artificial
    corners introduced by hole merging are resolved before organic ones.
    """
    verts = poly.vertices
    n = len(verts)
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if signed_area(verts) <= 0:
        raise ValueError("polygon must be CCW")
    eps = geom_eps(verts)
    if not check_weakly_simple(poly, eps):
        raise ValueError("polygon is not simple")

    bridge_tag: Dict[frozenset, int] = {}
    for b_idx, (id_a, id_b) in enumerate(poly.bridges):
        bridge_tag[frozenset((id_a, id_b))] = b_idx

    tags: List[tuple] = []
    for i in range(n):
        pair = frozenset((poly.vertex_ids[i], poly.vertex_ids[(i + 1) % n]))
        if pair in bridge_tag:
            tags.append(("br", bridge_tag[pair]))
        else:
            tags.append(("b", i))

    state = _State(eps)
    root = _SubPoly(list(verts), list(range(n)), list(range(n)), tags)
    state.next_occ = n
    state.register(root, changed=())

    # queue every reflex vertex, keyhole-bridge corners last so they pop first
    entries = []
    for pid, sub in state.polys.items():
        m = len(sub.pts)
        for pos in range(m):
            if orient(sub.pts[pos - 1], sub.pts[pos], sub.pts[(pos + 1) % m], eps) < 0:
                is_bridge = sub.orig[pos] < n and poly.bridge_flags[sub.orig[pos]]
                entries.append((is_bridge, sub.orig[pos], sub.occ[pos]))
    entries.sort()
    state.concave.extend(key for _, _, key in entries)

    guard = 0
    while state.concave:
        guard += 1
        if guard > 8 * n + 64:
            raise DissectionError("cut budget exceeded")
        key = state.concave.pop()
        loc = state.occ_map.get(key)
        if loc is None:
            continue  # endpoint of an earlier split; re-queued under a fresh key
        pid, pos = loc
        sub = state.polys[pid]
        m = len(sub.pts)
        if orient(sub.pts[pos - 1], sub.pts[pos], sub.pts[(pos + 1) % m], eps) >= 0:
            continue
        j = _pick_cut(sub, pos, eps)
        if j is None:
            raise DissectionError("reflex vertex sees no cut candidate")

        cut_id = len(state.cut_records)
        state.cut_records.append((sub.pts[min(pos, j)], sub.pts[max(pos, j)]))
        i, k = min(pos, j), max(pos, j)

        p1 = _SubPoly(sub.pts[i:k + 1], sub.occ[i:k + 1], sub.orig[i:k + 1],
                      sub.tags[i:k] + [("cut", cut_id)])
        p2 = _SubPoly(sub.pts[k:] + sub.pts[:i + 1],
                      sub.occ[k:] + sub.occ[:i + 1],
                      sub.orig[k:] + sub.orig[:i + 1],
                      sub.tags[k:] + sub.tags[:i] + [("cut", cut_id)])
        state.unregister(sub, pid)
        # endpoint angles changed in both halves: fresh keys, re-queue
        state.register(p1, changed=(0, len(p1.pts) - 1))
        state.register(p2, changed=(0, len(p2.pts) - 1))

    return _finalize(poly, state.polys, state.cut_records, eps)


class _State:
    """Bookkeeping for active sub-polygons and the reflex work list."""

    def __init__(self, eps: float):
        self.eps = eps
        self.polys: Dict[int, _SubPoly] = {}
        self.occ_map: Dict[int, Tuple[int, int]] = {}
        self.concave: List[int] = []
        self.cut_records: List[Tuple[Point, Point]] = []
        self.next_occ = 0
        self.next_poly = 0

    def fresh_key(self) -> int:
        key = self.next_occ
        self.next_occ += 1
        return key

    def unregister(self, sub: _SubPoly, pid: int):
        del self.polys[pid]
        for okey in sub.occ:
            self.occ_map.pop(okey, None)

    def register(self, sub: _SubPoly, changed: Sequence[int]):
        """Store a sub-polygon, splitting naked point-pinches first.

        A coordinate the ring visits twice without coincident flanking
        edges is a point contact, not a passage: the ring is partitioned
        there into two lobes and no cutline is recorded. Positions in
        ``changed`` (plus pinch corners) get fresh occurrence keys and are
        re-queued when still reflex.
        """
        changed_set = set(changed)
        pinch = _find_naked_pinch(sub, self.eps)
        if pinch is not None:
            i, k = pinch
            m = len(sub.pts)
            lobe1 = _SubPoly(sub.pts[i:k], sub.occ[i:k], sub.orig[i:k],
                             sub.tags[i:k])
            rest_idx = list(range(k, m)) + list(range(0, i))
            lobe2 = _SubPoly([sub.pts[x] for x in rest_idx],
                             [sub.occ[x] for x in rest_idx],
                             [sub.orig[x] for x in rest_idx],
                             [sub.tags[x] for x in rest_idx])
            for lobe, offset in ((lobe1, i), (lobe2, None)):
                mapped = set()
                for pos, okey in enumerate(lobe.occ):
                    src = rest_idx[pos] if offset is None else offset + pos
                    if src in changed_set:
                        mapped.add(pos)
                mapped.add(0)  # the pinch corner's wedge changed in each lobe
                self.register(lobe, changed=sorted(mapped))
            return

        if len(sub.pts) < 3:
            raise DissectionError("degenerate sub-polygon")
        pid = self.next_poly
        self.next_poly += 1
        self.polys[pid] = sub
        m = len(sub.pts)
        for pos in range(m):
            if pos in changed_set:
                sub.occ[pos] = self.fresh_key()
            self.occ_map[sub.occ[pos]] = (pid, pos)
        for pos in changed_set:
            if orient(sub.pts[pos - 1], sub.pts[pos], sub.pts[(pos + 1) % m],
                      self.eps) < 0:
                self.concave.append(sub.occ[pos])


def _find_naked_pinch(sub: _SubPoly, eps: float) -> Optional[Tuple[int, int]]:
    """First repeated-coordinate pair that splits into two positive lobes.

    A genuine point contact partitions the ring into two CCW lobes. The
    repeated coordinates along a keyhole slit never qualify: one of their
    lobes is a hole ring (negative) or a zero-width spike, so slits are
    left to the regular cutting machinery.
    """
    seen: Dict[Point, List[int]] = {}
    for pos, p in enumerate(sub.pts):
        seen.setdefault(p, []).append(pos)
    m = len(sub.pts)
    for p, occs in seen.items():
        if len(occs) < 2:
            continue
        for a in range(len(occs)):
            for b in range(a + 1, len(occs)):
                i, k = occs[a], occs[b]
                if k - i < 3 or m - (k - i) < 3:
                    continue  # lobe would be degenerate
                if signed_area(sub.pts[i:k]) > eps and \
                        signed_area(sub.pts[k:] + sub.pts[:i]) > eps:
                    return i, k
    return None


def _pick_cut(sub: _SubPoly, pos: int, eps: float) -> Optional[int]:
    """Best-first search over resolving-cone candidates; falls back to any
    interior-wedge candidate if the cone yields nothing (the still-reflex
    endpoint is re-queued by the caller in that case)."""
    pts = sub.pts
    m = len(pts)
    v = pts[pos]
    edges = _EdgeArrays(pts)

    scored = []
    relaxed = []
    for j in range(m):
        if j == pos or (j - pos) % m == 1 or (pos - j) % m == 1:
            continue
        w = pts[j]
        if abs(w[0] - v[0]) <= eps and abs(w[1] - v[1]) <= eps:
            continue
        theta, t1 = _interior_angles(pts, pos, w)
        if not (1e-12 < t1 < theta - 1e-12) or not _in_wedge(pts, j, v):
            continue
        t2 = theta - t1
        ratio = min(t1, t2) / max(t1, t2)
        d2 = (w[0] - v[0]) ** 2 + (w[1] - v[1]) ** 2
        key = (-round(ratio, 9), d2, sub.orig[j])
        if orient(pts[pos - 1], v, w, eps) >= 0 and \
           orient(w, v, pts[(pos + 1) % m], eps) >= 0:
            scored.append((key, j))
        else:
            relaxed.append((key, j))
    for pool in (sorted(scored), sorted(relaxed)):
        for _, j in pool:
            if not edges.segment_blocked(pts, pos, j, eps):
                return j
    return None


def _finalize(poly: SimplePolygon, polys: Dict[int, _SubPoly],
              cut_records: List[Tuple[Point, Point]], eps: float) -> DissectionMap:
    cells: List[ConvexCell] = []
    cut_sides: Dict[int, List[int]] = {}
    bridge_sides: Dict[int, List[int]] = {}

    for cid, (pid, sub) in enumerate(sorted(polys.items())):
        if not is_convex(sub.pts, eps):
            raise DissectionError(f"cell {cid} is not convex")
        cell = ConvexCell(cid, list(sub.pts), [], vertex_centroid(sub.pts))
        cells.append(cell)
        for tag in sub.tags:
            if tag[0] == "cut":
                cut_sides.setdefault(tag[1], []).append(cid)
            elif tag[0] == "br":
                bridge_sides.setdefault(tag[1], []).append(cid)

    cutlines: List[Cutline] = []

    def add_cutline(a: Point, b: Point, sides: List[int], from_bridge: bool):
        if len(sides) != 2:
            raise DissectionError(f"cutline with {len(sides)} incident cells")
        c0 = cells[sides[0]].centroid
        s = orient(a, b, c0, eps)
        if s == 0:
            raise DissectionError("degenerate cell flanking a cutline")
        left, right = (sides[0], sides[1]) if s > 0 else (sides[1], sides[0])
        cutlines.append(Cutline(len(cutlines), a, b, left, right, from_bridge))

    for cut_id, (a, b) in enumerate(cut_records):
        add_cutline(a, b, cut_sides.get(cut_id, []), False)
    for b_idx, (id_a, id_b) in enumerate(poly.bridges):
        sides = bridge_sides.get(b_idx, [])
        a = poly.vertices[poly.vertex_ids.index(id_a)]
        b = poly.vertices[poly.vertex_ids.index(id_b)]
        add_cutline(a, b, sides, True)

    cutlines = _merge_collinear(cutlines, eps)
    for cl in cutlines:
        cells[cl.left_cell].cutline_ids.append(cl.id)
        cells[cl.right_cell].cutline_ids.append(cl.id)

    area_in = signed_area(poly.vertices)
    area_out = sum(c.area() for c in cells)
    peri = sum(math.hypot(poly.vertices[i][0] - poly.vertices[i - 1][0],
                          poly.vertices[i][1] - poly.vertices[i - 1][1])
               for i in range(len(poly.vertices)))
    if abs(area_in - area_out) > max(eps * peri, 1e-6 * abs(area_in)):
        raise DissectionError("cell areas do not sum to the polygon area")

    return DissectionMap(cells, cutlines, poly.provenance, eps, bbox(poly.vertices))


def _merge_collinear(cutlines: List[Cutline], eps: float) -> List[Cutline]:
    """Fuse chains of collinear cutlines that separate the same two cells."""
    by_pair: Dict[frozenset, List[Cutline]] = {}
    for cl in cutlines:
        by_pair.setdefault(frozenset((cl.left_cell, cl.right_cell)), []).append(cl)

    merged: List[Cutline] = []
    for pair in sorted(by_pair, key=lambda p: min(by_pair[p], key=lambda c: c.id).id):
        group = by_pair[pair]
        changed = True
        while changed and len(group) > 1:
            changed = False
            for x in range(len(group)):
                for y in range(x + 1, len(group)):
                    fused = _try_fuse(group[x], group[y], eps)
                    if fused is not None:
                        group[x] = fused
                        group.pop(y)
                        changed = True
                        break
                if changed:
                    break
        merged.extend(group)

    merged.sort(key=lambda c: c.id)
    out = []
    for new_id, cl in enumerate(merged):
        out.append(Cutline(new_id, cl.a, cl.b, cl.left_cell, cl.right_cell, cl.from_bridge))
    return out


def _try_fuse(u: Cutline, v: Cutline, eps: float) -> Optional[Cutline]:
    pts = None
    for p, q in ((u.a, u.b), (u.b, u.a)):
        for r, s in ((v.a, v.b), (v.b, v.a)):
            if abs(q[0] - r[0]) <= eps and abs(q[1] - r[1]) <= eps:
                pts = (p, q, s)
    if pts is None:
        return None
    p, q, s = pts
    if orient(p, q, s, eps) != 0:
        return None
    keep = min(u, v, key=lambda c: c.id)
    return Cutline(keep.id, p, s, keep.left_cell, keep.right_cell,
                   u.from_bridge or v.from_bridge)
