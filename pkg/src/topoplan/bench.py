"""Benchmark harness: planner variants against tasks, with oracle anchors.

For every task the reference cost is the best length seen anywhere (all
planner runs plus the grid-search oracle); times-to-2% are computed
against that reference, so variants compete on one common yardstick.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .baseline import RrtStarBaseline
from .gridmap import IngestConfig, OccupancyGrid
from .mapgen import generate
from .oracles import UnreachableError, oracle_dijkstra
from .planner import PlanResult, SamplerParams, Task, plan, time_to_threshold
from .workspace import Workspace, build_workspace

PLANNERS = ("cdt", "cdt-undecoupled", "cdt-noprune", "cdt-noalpha", "rrt-star")


@dataclass
class MapSpec:
    archetype: str
    seed: int = 0
    params: Dict = field(default_factory=dict)
    name: Optional[str] = None

    def label(self) -> str:
        return self.name or f"{self.archetype}-{self.seed}"


@dataclass
class BenchSpec:
    maps: List[MapSpec]
    tasks_per_map: int = 2
    planners: Tuple[str, ...] = ("cdt", "rrt-star")
    repetitions: int = 5
    iterations: int = 800
    beta: float = 0.2
    beta_grid: Tuple[float, ...] = ()
    seed: int = 0
    time_budget_s: Optional[float] = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for b in (self.beta, *self.beta_grid):
            if not (0.0 < b <= 1.0):
                raise ValueError("beta values must lie in (0, 1]")
        for p in self.planners:
            if p not in PLANNERS:
                raise ValueError(f"unknown planner {p!r}")


@dataclass
class RunRecord:
    map: str
    task: int
    planner: str
    beta: float
    repetition: int
    seed: int
    length: Optional[float]
    t_init_us: Optional[float]
    t_2pct_us: Optional[float]
    classes: int
    cutlines_considered: int
    budget_exceeded: bool = False


def run_variant(name: str, ws: Workspace, comp_idx: int, task: Task,
                beta: float) -> Tuple[Optional[float], Optional[float],
                                      List[Tuple[float, float]], int, int]:
    """(final length, t_init, history, classes, cutlines considered)."""
    comp = ws.components[comp_idx]
    if name == "rrt-star":
        base = RrtStarBaseline(comp.dissection, seed=task.seed)
        res = base.plan(task.x_init, task.x_goal, task.iterations)
        return res.best_length, res.t_init_us, res.history, 0, 0
    params = SamplerParams(beta=beta, alpha_enabled=(name != "cdt-noalpha"))
    result = plan(task, comp.dissection, comp.graph, params,
                  decouple=(name != "cdt-undecoupled"),
                  prune=(name != "cdt-noprune"))
    return (result.best_length, result.t_init_us, result.history,
            len(result.classes), result.cutlines_considered)


def _task_seed(base: int, map_idx: int, task_idx: int, planner: str,
               beta: float, rep: int) -> int:
    h = (base * 1_000_003 + map_idx * 10_007 + task_idx * 101
         + PLANNERS.index(planner) * 13 + int(beta * 1000) * 7 + rep)
    return h % (2 ** 31)


def pick_tasks(ws: Workspace, grid: OccupancyGrid, count: int,
               seed: int) -> List[Tuple[Tuple[float, float], Tuple[float, float], int]]:
    """Well-separated task endpoints inside the largest component."""
    rng = np.random.default_rng(seed)
    comp_idx = max(range(len(ws.components)),
                   key=lambda i: sum(c.area() for c in ws.components[i].dissection.cells))
    dm = ws.components[comp_idx].dissection
    x0, y0, x1, y1 = dm.bounds
    diag = math.hypot(x1 - x0, y1 - y0)
    tasks = []
    guard = 0
    while len(tasks) < count and guard < 4000:
        guard += 1
        p = (x0 + rng.random() * (x1 - x0), y0 + rng.random() * (y1 - y0))
        q = (x0 + rng.random() * (x1 - x0), y0 + rng.random() * (y1 - y0))
        lp = ws.locate_component(p)
        lq = ws.locate_component(q)
        if lp is None or lq is None or lp[0] != comp_idx or lq[0] != comp_idx:
            continue
        if math.dist(p, q) < 0.35 * diag:
            continue
        tasks.append((p, q, comp_idx))
    if len(tasks) < count:
        raise RuntimeError("could not find enough well-separated tasks")
    return tasks


def run_bench(spec: BenchSpec, workers: int = 1) -> Dict:
    records: List[RunRecord] = []
    per_task_best: Dict[Tuple[str, int], float] = {}
    oracle_lengths: Dict[Tuple[str, int], Optional[float]] = {}

    jobs = []
    for m_idx, mspec in enumerate(spec.maps):
        grid = generate(mspec.archetype, seed=mspec.seed, **mspec.params)
        ws = build_workspace(grid, IngestConfig(epsilon_fit=1.0))
        tasks = pick_tasks(ws, grid, spec.tasks_per_map, spec.seed + m_idx)
        for t_idx, (p, q, comp_idx) in enumerate(tasks):
            key = (mspec.label(), t_idx)
            try:
                o_len, _ = oracle_dijkstra(grid, p, q)
                oracle_lengths[key] = o_len
                per_task_best[key] = o_len
            except UnreachableError:
                oracle_lengths[key] = None
            betas = spec.beta_grid or (spec.beta,)
            for planner_name in spec.planners:
                for beta in betas:
                    for rep in range(spec.repetitions):
                        seed = _task_seed(spec.seed, m_idx, t_idx, planner_name,
                                          beta, rep)
                        jobs.append((key, ws, comp_idx, planner_name, beta, rep,
                                     Task(p, q, spec.iterations, seed)))

    def execute(job):
        key, ws, comp_idx, planner_name, beta, rep, task = job
        t_start = time.perf_counter()
        length, t_init, history, classes, considered = run_variant(
            planner_name, ws, comp_idx, task, beta)
        exceeded = (spec.time_budget_s is not None
                    and time.perf_counter() - t_start > spec.time_budget_s)
        return key, planner_name, beta, rep, task.seed, length, t_init, \
            history, classes, considered, exceeded

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(execute, jobs))
    else:
        outputs = [execute(j) for j in jobs]

    histories = {}
    for key, planner_name, beta, rep, seed, length, t_init, history, classes, \
            considered, exceeded in outputs:
        if length is not None:
            cur = per_task_best.get(key)
            per_task_best[key] = length if cur is None else min(cur, length)
        histories[(key, planner_name, beta, rep)] = history
        records.append(RunRecord(key[0], key[1], planner_name, beta, rep, seed,
                                 length, t_init, None, classes, considered,
                                 exceeded))

    for rec in records:
        c_opt = per_task_best.get((rec.map, rec.task))
        if c_opt is None:
            continue
        history = histories[((rec.map, rec.task), rec.planner, rec.beta,
                             rec.repetition)]
        rec.t_2pct_us = time_to_threshold(history, c_opt)

    return {
        "meta": {
            "c_optimal_definition": "min over all planner runs and the "
                                    "grid-search oracle, per task",
            "seed": spec.seed,
            "iterations": spec.iterations,
            "repetitions": spec.repetitions,
        },
        "oracle_lengths": {f"{k[0]}/{k[1]}": v for k, v in oracle_lengths.items()},
        "c_optimal": {f"{k[0]}/{k[1]}": v for k, v in per_task_best.items()},
        "records": [rec.__dict__ for rec in records],
        "summary": summarize(records, per_task_best),
    }


def summarize(records: Sequence[RunRecord],
              per_task_best: Dict[Tuple[str, int], float]) -> Dict:
    out: Dict[str, Dict] = {}
    by_planner: Dict[str, List[RunRecord]] = {}
    for rec in records:
        by_planner.setdefault(rec.planner, []).append(rec)
    for name, recs in sorted(by_planner.items()):
        t_init = [r.t_init_us for r in recs if r.t_init_us is not None]
        t_2pct = [r.t_2pct_us for r in recs if r.t_2pct_us is not None]
        ratios = []
        for r in recs:
            c_opt = per_task_best.get((r.map, r.task))
            if r.length is not None and c_opt:
                ratios.append(r.length / c_opt)
        out[name] = {
            "runs": len(recs),
            "success_rate": sum(1 for r in recs if r.length is not None) / len(recs),
            "t_init_mean_us": float(np.mean(t_init)) if t_init else None,
            "t_init_median_us": float(np.median(t_init)) if t_init else None,
            "t_2pct_mean_us": float(np.mean(t_2pct)) if t_2pct else None,
            "t_2pct_median_us": float(np.median(t_2pct)) if t_2pct else None,
            "t_2pct_hits": len(t_2pct),
            "length_ratio_mean": float(np.mean(ratios)) if ratios else None,
        }
    return out


def records_to_csv(report: Dict) -> str:
    cols = ["map", "task", "planner", "beta", "repetition", "seed", "length",
            "t_init_us", "t_2pct_us", "classes", "cutlines_considered",
            "budget_exceeded"]
    lines = [",".join(cols)]
    for rec in report["records"]:
        row = []
        for c in cols:
            v = rec[c]
            if v is None:
                row.append("")
            elif isinstance(v, bool):
                row.append("1" if v else "0")
            elif isinstance(v, float):
                row.append(f"{v:.6f}")
            else:
                row.append(str(v))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Small statistics helpers used by the experiment drivers
# ---------------------------------------------------------------------------

def sign_test_p(wins: int, n: int) -> float:
    """One-sided sign test: P[X >= wins] for X ~ Binomial(n, 1/2)."""
    return sum(math.comb(n, k) for k in range(wins, n + 1)) / 2.0 ** n


def bootstrap_mean_diff_ci(a: Sequence[float], b: Sequence[float],
                           iters: int = 2000, seed: int = 0,
                           level: float = 0.95) -> Tuple[float, float]:
    """Percentile CI of mean(a) - mean(b)."""
    rng = np.random.default_rng(seed)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diffs = np.empty(iters)
    for i in range(iters):
        diffs[i] = rng.choice(a, a.size).mean() - rng.choice(b, b.size).mean()
    lo = float(np.quantile(diffs, (1 - level) / 2))
    hi = float(np.quantile(diffs, 1 - (1 - level) / 2))
    return lo, hi
