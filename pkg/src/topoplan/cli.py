"""Command-line front end.

Subcommands: init (grid -> dissection artifact), plan, encode (polyline ->
class code), bench, genmaps. Exit codes: 0 ok, 2 unreachable, 3 I/O
error, 4 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import bench as bench_mod
from . import mapgen
from .gridmap import GridFormatError, IngestConfig, dump_pgm, load_grid
from .oracles import UnreachableError as OracleUnreachable
from .planner import SamplerParams, Task, UnreachableError, plan
from .svgout import render_svg
from .topology import OutsideFreeSpaceError, format_code, reduce_path, trace
from .workspace import build_workspace, workspace_from_json, workspace_to_json

EXIT_OK = 0
EXIT_UNREACHABLE = 2
EXIT_IO = 3
EXIT_INVALID = 4


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnreachableError, OracleUnreachable) as exc:
        print(f"unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except (OSError, GridFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, OutsideFreeSpaceError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topoplan",
                                description="Convex-dissection path planning toolkit")
    sub = p.add_subparsers(required=True)

    q = sub.add_parser("init", help="build a dissection artifact from a PGM map")
    q.add_argument("--map", required=True)
    q.add_argument("--epsilon", type=float, default=None,
                   help="boundary fit bound in map units (default: 8 pixels)")
    q.add_argument("--resolution", type=float, default=1.0)
    q.add_argument("--occupied-threshold", type=int, default=128)
    q.add_argument("--out", required=True)
    q.add_argument("--svg", default=None)
    q.set_defaults(func=cmd_init)

    q = sub.add_parser("plan", help="plan a task on an artifact")
    q.add_argument("--artifact", required=True)
    q.add_argument("--start", required=True, help="x,y in map units")
    q.add_argument("--goal", required=True, help="x,y in map units")
    q.add_argument("--iterations", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--beta", type=float, default=0.2)
    q.add_argument("--alpha", type=float, default=1e9)
    q.add_argument("--variant", default="cdt",
                   choices=["cdt", "cdt-undecoupled", "cdt-noprune", "cdt-noalpha"])
    q.add_argument("--svg", default=None)
    q.add_argument("--out", default=None, help="write the JSON report here")
    q.set_defaults(func=cmd_plan)

    q = sub.add_parser("encode", help="class code of a polyline")
    q.add_argument("--artifact", required=True)
    q.add_argument("--polyline", required=True,
                   help="JSON file: [[x, y], ...]")
    q.set_defaults(func=cmd_encode)

    q = sub.add_parser("bench", help="run the benchmark harness")
    q.add_argument("--archetypes", nargs="+", default=["cluttered"],
                   choices=list(mapgen.ARCHETYPES))
    q.add_argument("--planners", nargs="+", default=["cdt", "rrt-star"],
                   choices=list(bench_mod.PLANNERS))
    q.add_argument("--repetitions", type=int, default=5)
    q.add_argument("--tasks", type=int, default=2)
    q.add_argument("--iterations", type=int, default=800)
    q.add_argument("--beta", type=float, default=0.2)
    q.add_argument("--beta-grid", nargs="*", type=float, default=[])
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--format", default="json", choices=["json", "csv"])
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_bench)

    q = sub.add_parser("genmaps", help="write corpus PGM maps")
    q.add_argument("--out-dir", required=True)
    q.add_argument("--archetype", default="all",
                   choices=["all", *mapgen.ARCHETYPES])
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=1)
    q.set_defaults(func=cmd_genmaps)
    return p


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def cmd_init(args) -> int:
    data = Path(args.map).read_bytes()
    grid = load_grid(data, resolution=args.resolution,
                     occ_threshold=args.occupied_threshold)
    epsilon = args.epsilon if args.epsilon is not None else 8.0 * args.resolution
    t0 = time.perf_counter()
    ws = build_workspace(grid, IngestConfig(epsilon_fit=epsilon,
                                            occ_threshold=args.occupied_threshold))
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    Path(args.out).write_text(workspace_to_json(ws))
    stats = ws.stats()
    print(f"components: {stats['components']}  cells: {stats['cells']}  "
          f"cutlines: {stats['cutlines']}  time_ms: {elapsed_ms:.1f}")
    if args.svg and ws.components:
        Path(args.svg).write_text(render_svg(ws.components[0].dissection))
    return EXIT_OK


def cmd_plan(args) -> int:
    ws = workspace_from_json(Path(args.artifact).read_text())
    start = _parse_point(args.start)
    goal = _parse_point(args.goal)
    ls = ws.locate_component(start)
    lg = ws.locate_component(goal)
    if ls is None or lg is None:
        raise UnreachableError("an endpoint is not in free space")
    if ls[0] != lg[0]:
        raise UnreachableError("start and goal lie in different components")
    comp = ws.components[ls[0]]

    params = SamplerParams(alpha=args.alpha, beta=args.beta,
                           alpha_enabled=(args.variant != "cdt-noalpha"))
    task = Task(start, goal, args.iterations, args.seed)
    result = plan(task, comp.dissection, comp.graph, params,
                  decouple=(args.variant != "cdt-undecoupled"),
                  prune=(args.variant != "cdt-noprune"))

    doc = {
        "plan": {
            "best_path": result.best_path,
            "code": format_code(result.best_code) if result.best_code else None,
            "length": result.best_length,
            "classes": {format_code_key(k): v for k, v in result.classes.items()},
            "iterations": result.iterations,
            "reason": result.reason,
            "seed": result.seed,
            "cutlines_considered": result.cutlines_considered,
        },
        "timing_us": {
            "t_init": result.t_init_us,
            "t_2pct": result.t_2pct_us,
        },
    }
    text = json.dumps(doc, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    if args.svg:
        Path(args.svg).write_text(render_svg(
            comp.dissection, None, None, result.best_path))
    return EXIT_OK


def format_code_key(nodes) -> str:
    return ",".join(str(n) for n in nodes)


def cmd_encode(args) -> int:
    ws = workspace_from_json(Path(args.artifact).read_text())
    pts = json.loads(Path(args.polyline).read_text())
    polyline = [tuple(map(float, p)) for p in pts]
    loc = ws.locate_component(polyline[0])
    if loc is None:
        raise OutsideFreeSpaceError("polyline starts outside free space", 0)
    comp = ws.components[loc[0]]
    try:
        code = reduce_path(trace(comp.dissection, polyline))
    except OutsideFreeSpaceError as exc:
        print(f"invalid input: polyline leaves free space at segment "
              f"{exc.segment}", file=sys.stderr)
        return EXIT_INVALID
    print(format_code(code))
    return EXIT_OK


def cmd_bench(args) -> int:
    maps = []
    for arch in args.archetypes:
        maps.append(bench_mod.MapSpec(arch, seed=args.seed))
    spec = bench_mod.BenchSpec(
        maps=maps,
        tasks_per_map=args.tasks,
        planners=tuple(args.planners),
        repetitions=args.repetitions,
        iterations=args.iterations,
        beta=args.beta,
        beta_grid=tuple(args.beta_grid),
        seed=args.seed,
    )
    report = bench_mod.run_bench(spec, workers=args.workers)
    if args.format == "csv":
        text = bench_mod.records_to_csv(report)
    else:
        text = json.dumps(report, sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(text)
        print(json.dumps(report["summary"], sort_keys=True, indent=1))
    else:
        print(text)
    return EXIT_OK


def cmd_genmaps(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    archetypes = list(mapgen.ARCHETYPES) if args.archetype == "all" else [args.archetype]
    for arch in archetypes:
        for k in range(args.count):
            grid = mapgen.generate(arch, seed=args.seed + k)
            path = out_dir / f"{arch}-{args.seed + k}.pgm"
            path.write_bytes(dump_pgm(grid))
            print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
