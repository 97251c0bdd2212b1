"""Sampling planner over a dissection: class discovery plus per-class solves.

The tree grows only on cutlines (optimal paths bend nowhere else), so a
sample is a point on a chosen cutline and connects to the cheapest tree
node in the two flanking cells; the connecting segment stays inside one
convex cell and needs no collision check. Near-goal nodes spawn class
codes by tracing their root path; each new code is handed to the
elastic-band solver, which returns the class optimum directly instead of
waiting for asymptotic rewiring to converge.

Cutline selection is a roulette over
``min(1, mu) * (1 + alpha * [eta == 0]) * beta ** kappa``:
``mu`` gates cutlines with no reachable tree node, the ``alpha`` boost
forces every cutline to be visited once early, and ``beta`` discounts
cutlines already used by known classes so unexplored classes keep
getting sampled.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .dissection import DissectionMap
from .geometry import Point, dist
from .shortest import SolverConfig, shortest_in_class
from .topology import (
    OutsideFreeSpaceError,
    TopoPath,
    TopologyGraph,
    concat,
    invert,
    locate,
    reduce_path,
    runtime,
)


class UnreachableError(RuntimeError):
    """Start and goal are not connected in this dissection."""


@dataclass
class Task:
    x_init: Point
    x_goal: Point
    iterations: int = 1000
    seed: int = 0


@dataclass
class SamplerParams:
    alpha: float = 1e9
    beta: float = 0.2
    goal_rule: str = "goal-cell-cutline"
    alpha_enabled: bool = True

    def __post_init__(self):
        if self.alpha < 1e6:
            raise ValueError("alpha must be a very large number (>= 1e6)")
        if not (0.0 < self.beta <= 1.0):
            raise ValueError("beta must lie in (0, 1]")
        if self.goal_rule != "goal-cell-cutline":
            raise ValueError(f"unknown goal rule: {self.goal_rule!r}")


@dataclass
class PlanResult:
    best_path: Optional[List[Point]]
    best_code: Optional[TopoPath]
    best_length: Optional[float]
    classes: Dict[Tuple[int, ...], float]
    t_init_us: Optional[float]
    t_2pct_us: Optional[float]
    iterations: int
    reason: str
    history: List[Tuple[float, float]] = field(default_factory=list)
    cutlines_total: int = 0
    cutlines_considered: int = 0
    nodes: int = 0
    seed: int = 0

    def succeeded(self) -> bool:
        return self.best_path is not None


def time_to_threshold(history: Sequence[Tuple[float, float]],
                      c_optimal: float, slack: float = 1.02) -> Optional[float]:
    """First recorded time at which the incumbent got within slack of
    c_optimal; None if it never did."""
    for t_us, length in history:
        if length <= slack * c_optimal:
            return t_us
    return None


# ---------------------------------------------------------------------------
# Branch reduction
# ---------------------------------------------------------------------------

@dataclass
class PrunedTopology:
    alive: Set[int]
    active_cutlines: List[int]
    neighbors: Dict[int, List[int]]  # distinct alive neighbor nodes

    def cutline_count(self) -> int:
        return len(self.active_cutlines)


def reduce_branches(graph: TopologyGraph, init_cell: int, goal_cell: int
                    ) -> Tuple[PrunedTopology, Optional[TopoPath]]:
    """Strip dead-end cells, then follow forced corridors from both ends.

    A cell with a single neighbor can never lie on an optimal path unless
    an endpoint sits in it, so such cells are peeled off iteratively.
    When the corridor walks from start and goal meet (or one reaches the
    other's cell), the class of the global optimum is already decided and
    is returned alongside the pruned graph.
    """
    if init_cell not in graph.adjacency or goal_cell not in graph.adjacency:
        raise UnreachableError("endpoint cell is not in the topology graph")

    nbr: Dict[int, Set[int]] = {n: set(graph.neighbor_nodes(n)) for n in graph.nodes}
    alive: Set[int] = set(graph.nodes)
    keep = {init_cell, goal_cell}

    for x in sorted(n for n in graph.nodes if len(nbr[n]) <= 1):
        x_temp = x
        while x_temp in alive and x_temp not in keep and len(nbr[x_temp] & alive) <= 1:
            nxt = next(iter(nbr[x_temp] & alive), None)
            alive.discard(x_temp)
            if nxt is None:
                break
            x_temp = nxt

    if not _connected(nbr, alive, init_cell, goal_cell):
        raise UnreachableError("start and goal are not connected")

    neighbors = {n: sorted(nbr[n] & alive) for n in alive}
    active = [eid for eid, a, b in graph.edges if a in alive and b in alive]
    pruned = PrunedTopology(alive, active, neighbors)

    def walk(start: int, target: int) -> Tuple[List[int], bool]:
        seq = [start]
        while True:
            unexplored = [n for n in neighbors[seq[-1]] if n not in seq]
            if len(unexplored) != 1:
                return seq, False
            seq.append(unexplored[0])
            if unexplored[0] == target:
                return seq, True

    if init_cell == goal_cell:
        return pruned, TopoPath((init_cell,))

    f_init, met = walk(init_cell, goal_cell)
    if met:
        return pruned, _with_edges(graph, f_init)
    f_goal, met = walk(goal_cell, init_cell)
    if met:
        return pruned, _with_edges(graph, list(reversed(f_goal)))
    if f_init[-1] == f_goal[-1]:
        joined = f_init + list(reversed(f_goal))[1:]
        return pruned, _with_edges(graph, joined)
    return pruned, None


def _with_edges(graph: TopologyGraph, nodes: List[int]) -> TopoPath:
    edges = []
    for a, b in zip(nodes, nodes[1:]):
        edges.append(min(graph.edges_between(a, b)))
    return reduce_path(TopoPath(tuple(nodes), tuple(edges)))


def _connected(nbr, alive, a, b) -> bool:
    if a not in alive or b not in alive:
        return False
    seen = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        if u == b:
            return True
        for v in nbr[u]:
            if v in alive and v not in seen:
                seen.add(v)
                stack.append(v)
    return False


# ---------------------------------------------------------------------------
# Sampling statistics
# ---------------------------------------------------------------------------

class CutlineStats:
    """Roulette weights over cutlines with cached cumulative sums.

    mu_i counts tree nodes in the two cells flanking cutline i, eta_i the
    samples drawn on it, kappa_i its uses by recorded classes. Only the
    min(1, mu) gate, the eta == 0 boost and kappa changes alter weights,
    so the cumulative table is rebuilt lazily on those transitions.
    """

    def __init__(self, dm: DissectionMap, active: Sequence[int],
                 params: SamplerParams):
        n = len(dm.cutlines)
        self.mu = np.zeros(n, dtype=np.int64)
        self.eta = np.zeros(n, dtype=np.int64)
        self.kappa = np.zeros(n, dtype=np.int64)
        self.active = np.zeros(n, dtype=bool)
        self.active[list(active)] = True
        self.params = params
        self._cum: Optional[np.ndarray] = None
        self._ids: Optional[np.ndarray] = None

    def _invalidate(self):
        self._cum = None

    def bump_mu(self, cutline_ids: Sequence[int]):
        for eid in cutline_ids:
            self.mu[eid] += 1
            if self.mu[eid] == 1:
                self._invalidate()

    def bump_eta(self, eid: int):
        self.eta[eid] += 1
        if self.eta[eid] == 1:
            self._invalidate()

    def bump_kappa(self, cutline_ids: Sequence[int]):
        changed = False
        for eid in cutline_ids:
            self.kappa[eid] += 1
            changed = True
        if changed:
            self._invalidate()

    def weights(self) -> np.ndarray:
        p = self.params
        w = np.minimum(1, self.mu).astype(float)
        if p.alpha_enabled:
            w = w * (1.0 + p.alpha * (self.eta == 0))
        if p.beta < 1.0:
            w = w * np.power(p.beta, self.kappa)
        w[~self.active] = 0.0
        return w

    def sample(self, dm: DissectionMap, rng) -> Tuple[int, Point]:
        if self._cum is None:
            w = self.weights()
            ids = np.nonzero(w > 0.0)[0]
            if ids.size == 0:
                raise RuntimeError("no sampleable cutline (gate is empty)")
            self._ids = ids
            self._cum = np.cumsum(w[ids])
        rho2 = rng.random()
        k = int(np.searchsorted(self._cum, rho2 * self._cum[-1], side="right"))
        k = min(k, len(self._ids) - 1)
        eid = int(self._ids[k])
        rho1 = rng.random()
        return eid, dm.cutlines[eid].point_at(rho1)


# ---------------------------------------------------------------------------
# Tree
# ---------------------------------------------------------------------------

class PlanTree:
    """Nodes on cutlines with parent links and exact cost-to-root."""

    def __init__(self, dm: DissectionMap, root: Point, root_cell: int, capacity: int):
        cap = capacity + 1
        self.xs = np.zeros(cap)
        self.ys = np.zeros(cap)
        self.cost = np.zeros(cap)
        self.parent = np.full(cap, -1, dtype=np.int64)
        self.cutline = np.full(cap, -1, dtype=np.int64)
        self.children: List[List[int]] = [[]]
        self.count = 1
        self.version = 0
        self.root_cell = root_cell
        self.xs[0], self.ys[0] = root
        self.cell_nodes: Dict[int, List[int]] = {root_cell: [0]}
        self.dm = dm

    def point(self, nid: int) -> Point:
        return (float(self.xs[nid]), float(self.ys[nid]))

    def add(self, p: Point, eid: int, parent: int) -> int:
        nid = self.count
        self.count += 1
        self.xs[nid], self.ys[nid] = p
        self.cutline[nid] = eid
        self.parent[nid] = parent
        self.cost[nid] = self.cost[parent] + dist(self.point(parent), p)
        self.children.append([])
        self.children[parent].append(nid)
        cl = self.dm.cutlines[eid]
        for cid in {cl.left_cell, cl.right_cell}:
            self.cell_nodes.setdefault(cid, []).append(nid)
        return nid

    def nodes_in_cells(self, cells: Sequence[int]) -> np.ndarray:
        lists = [self.cell_nodes.get(c, []) for c in cells]
        if len(lists) == 2 and lists[0] and lists[1]:
            merged = sorted(set(lists[0]) | set(lists[1]))
        else:
            merged = lists[0] or (lists[1] if len(lists) > 1 else [])
        return np.asarray(merged, dtype=np.int64)

    def reparent(self, nid: int, new_parent: int, new_cost: float):
        old = int(self.parent[nid])
        if old >= 0:
            self.children[old].remove(nid)
        delta = new_cost - float(self.cost[nid])
        self.parent[nid] = new_parent
        self.cost[nid] = new_cost
        self.children[new_parent].append(nid)
        stack = list(self.children[nid])
        while stack:
            k = stack.pop()
            self.cost[k] += delta
            stack.extend(self.children[k])
        self.version += 1

    def root_chain(self, nid: int) -> List[int]:
        chain = [nid]
        while self.parent[chain[-1]] >= 0:
            chain.append(int(self.parent[chain[-1]]))
        chain.reverse()
        return chain


def find_nodes_near(tree: PlanTree, dm: DissectionMap, eid: int) -> np.ndarray:
    """Tree nodes located in the two cells flanking cutline eid."""
    cl = dm.cutlines[eid]
    return tree.nodes_in_cells((cl.left_cell, cl.right_cell))


def find_closest(x_rand: Point, q_near: np.ndarray, tree: PlanTree) -> int:
    """argmin over candidates of cost-to-root plus straight-line leg."""
    if q_near.size == 0:
        raise ValueError("empty candidate set")
    dx = tree.xs[q_near] - x_rand[0]
    dy = tree.ys[q_near] - x_rand[1]
    total = tree.cost[q_near] + np.hypot(dx, dy)
    return int(q_near[int(np.argmin(total))])


def rewire(q_r: "deque[int] | List[int]", tree: PlanTree, dm: DissectionMap):
    """FIFO cost propagation: reparent any neighbor that gets cheaper via
    the popped node, then requeue it; loop until the queue drains."""
    queue = q_r if isinstance(q_r, deque) else deque(q_r)
    while queue:
        rid = queue.popleft()
        eid = int(tree.cutline[rid])
        if eid < 0:
            continue
        q_near = find_nodes_near(tree, dm, eid)
        p = tree.point(rid)
        for nid_ in q_near:
            nid = int(nid_)
            if nid == rid or nid == 0:
                continue
            cost_new = float(tree.cost[rid]) + dist(p, tree.point(nid))
            if cost_new < float(tree.cost[nid]):
                tree.reparent(nid, rid, cost_new)
                queue.append(nid)
    if queue is not q_r:
        q_r.clear()


def near_goal(eid: int, goal_cell: int, dm: DissectionMap) -> bool:
    """A cutline sample can finish iff its cutline borders the goal cell,
    making the final leg a single in-cell segment."""
    cl = dm.cutlines[eid]
    return goal_cell in (cl.left_cell, cl.right_cell)


def _root_trace(tree: PlanTree, nid: int, dm: DissectionMap
                ) -> Tuple[List[int], List[int]]:
    """Raw cell sequence (and crossed cutlines) of the root path to nid.

    Each tree edge lies inside exactly one cell (the one shared by the
    cutlines of its two endpoints; ties resolve to the lower id, matching
    the point-location tie-break), so the trace never needs geometry.
    """
    chain = tree.root_chain(nid)
    seg_cells = [tree.root_cell]
    for j in range(1, len(chain) - 1):
        ca = dm.cutlines[int(tree.cutline[chain[j]])]
        cb = dm.cutlines[int(tree.cutline[chain[j + 1]])]
        shared = {ca.left_cell, ca.right_cell} & {cb.left_cell, cb.right_cell}
        if not shared:
            raise RuntimeError("tree edge spans non-adjacent cutlines")
        seg_cells.append(min(shared))

    nodes = [seg_cells[0]]
    edges: List[int] = []
    for j in range(1, len(seg_cells)):
        if seg_cells[j] != nodes[-1]:
            nodes.append(seg_cells[j])
            edges.append(int(tree.cutline[chain[j]]))
    return nodes, edges


def backtrack_code(tree: PlanTree, nid: int, goal_cell: int,
                   dm: DissectionMap) -> TopoPath:
    """Reduced class code of the root path to nid plus the goal leg."""
    nodes, edges = _root_trace(tree, nid, dm)
    if nodes[-1] != goal_cell:
        nodes.append(goal_cell)
        edges.append(int(tree.cutline[tree.root_chain(nid)[-1]]))
    return reduce_path(TopoPath(tuple(nodes), tuple(edges)))


def root_polyline(tree: PlanTree, nid: int) -> List[Point]:
    return [tree.point(k) for k in tree.root_chain(nid)]


# ---------------------------------------------------------------------------
# Planner
# ---------------------------------------------------------------------------

@dataclass
class _QgEntry:
    nid: int
    version: int = -1


def plan(task: Task, dm: DissectionMap, graph: TopologyGraph,
         params: Optional[SamplerParams] = None, *,
         decouple: bool = True, prune: bool = True, debug: bool = False,
         stop_at_first_solution: bool = False,
         solver_cfg: Optional[SolverConfig] = None) -> PlanResult:
    """Run the full pipeline for one task on a prepared dissection.

    Ablation switches: ``decouple=False`` scores near-goal tree paths by
    raw length instead of solving each new class; ``prune=False`` skips
    branch reduction (and with it the direct-corridor shortcut);
    ``params.alpha_enabled=False`` drops the visit-once sampling boost.
    """
    params = params or SamplerParams()
    t0 = time.perf_counter_ns()

    def now_us() -> float:
        return (time.perf_counter_ns() - t0) / 1000.0

    try:
        init_cell = locate(dm, task.x_init)
        goal_cell = locate(dm, task.x_goal)
    except OutsideFreeSpaceError as exc:
        raise UnreachableError(str(exc)) from exc

    n_cutlines = len(dm.cutlines)
    result = PlanResult(None, None, None, {}, None, None, 0, "", [],
                        n_cutlines, n_cutlines, 1, task.seed)

    if init_cell == goal_cell:
        length = dist(task.x_init, task.x_goal)
        code = TopoPath((init_cell,))
        t = now_us()
        result.best_path = [task.x_init, task.x_goal]
        result.best_code = code
        result.best_length = length
        result.classes = {code.nodes: length}
        result.t_init_us = t
        result.t_2pct_us = t
        result.history = [(t, length)]
        result.reason = "same-cell"
        return result

    if prune:
        pruned, direct = reduce_branches(graph, init_cell, goal_cell)
        active = pruned.active_cutlines
    else:
        if not _connected({n: set(graph.neighbor_nodes(n)) for n in graph.nodes},
                          set(graph.nodes), init_cell, goal_cell):
            raise UnreachableError("start and goal are not connected")
        direct = None
        active = [e[0] for e in graph.edges]
    result.cutlines_considered = len(active)

    solver_cfg = solver_cfg or SolverConfig()

    if decouple and direct is not None:
        sol = shortest_in_class(direct, task.x_init, task.x_goal, dm, solver_cfg)
        t = now_us()
        result.best_path = sol.path
        result.best_code = direct
        result.best_length = sol.length
        result.classes = {direct.nodes: sol.length}
        result.t_init_us = t
        result.t_2pct_us = t
        result.history = [(t, sol.length)]
        result.reason = "direct-corridor"
        return result

    rng = np.random.default_rng(task.seed)
    tree = PlanTree(dm, task.x_init, init_cell, task.iterations)
    stats = CutlineStats(dm, active, params)
    stats.bump_mu([e for e in dm.cells[init_cell].cutline_ids if stats.active[e]])

    q_r: deque = deque()
    q_g: List[_QgEntry] = []
    best_len = math.inf
    iterations_used = 0

    for i in range(task.iterations):
        iterations_used = i + 1
        eid, x_rand = stats.sample(dm, rng)
        stats.bump_eta(eid)
        q_near = find_nodes_near(tree, dm, eid)
        if q_near.size == 0:
            raise RuntimeError("sampling gate violated: no nodes near cutline")
        closest = find_closest(x_rand, q_near, tree)
        nid = tree.add(x_rand, eid, closest)
        cl = dm.cutlines[eid]
        incident = set()
        for cid in (cl.left_cell, cl.right_cell):
            incident.update(e for e in dm.cells[cid].cutline_ids if stats.active[e])
        stats.bump_mu(sorted(incident))
        q_r.append(nid)
        if near_goal(eid, goal_cell, dm):
            q_g.append(_QgEntry(nid))
        else:
            rewire(q_r, tree, dm)
        if debug:
            _debug_invariants(tree, dm)

        for entry in q_g:
            if entry.version == tree.version:
                continue
            entry.version = tree.version
            code = backtrack_code(tree, entry.nid, goal_cell, dm)
            if decouple:
                if code.nodes in result.classes:
                    continue
                sol = shortest_in_class(code, task.x_init, task.x_goal, dm, solver_cfg)
                result.classes[code.nodes] = sol.length
                stats.bump_kappa(code.edges or ())
                if sol.length < best_len:
                    best_len = sol.length
                    result.best_path = sol.path
                    result.best_code = code
                    result.best_length = sol.length
                    t = now_us()
                    if result.t_init_us is None:
                        result.t_init_us = t
                    result.history.append((t, sol.length))
            else:
                pts = root_polyline(tree, entry.nid) + [task.x_goal]
                length = float(tree.cost[entry.nid]) + dist(tree.point(entry.nid),
                                                            task.x_goal)
                result.classes[code.nodes] = min(
                    result.classes.get(code.nodes, math.inf), length)
                if length < best_len:
                    best_len = length
                    result.best_path = pts
                    result.best_code = code
                    result.best_length = length
                    t = now_us()
                    if result.t_init_us is None:
                        result.t_init_us = t
                    result.history.append((t, length))

        if stop_at_first_solution and result.best_path is not None:
            result.reason = "first-solution"
            break

    result.nodes = tree.count
    if not result.reason:
        result.reason = "iterations" if result.best_path else "no-solution"
    if result.best_length is not None:
        result.t_2pct_us = time_to_threshold(result.history, result.best_length)
    return result


def _debug_invariants(tree: PlanTree, dm: DissectionMap):
    """Root-path traces must never repeat a cell; costs must be consistent."""
    for nid in range(1, tree.count):
        cells, _ = _root_trace(tree, nid, dm)
        if len(cells) != len(set(cells)):
            raise AssertionError(f"root path of node {nid} repeats a cell: {cells}")
        chain = tree.root_chain(nid)
        total = 0.0
        for a, b in zip(chain, chain[1:]):
            total += dist(tree.point(a), tree.point(b))
        if abs(total - float(tree.cost[nid])) > 1e-6 * max(1.0, total):
            raise AssertionError(f"cost of node {nid} inconsistent")
