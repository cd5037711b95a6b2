"""Command line: ``fmtstar plan | bench | env gen | oracle grid``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .costs import path_cost
from .environments import (
    COST_FIELD_KINDS,
    BugTrapSpec,
    ClutterSpec,
    MazeSpec,
    bug_trap_2d,
    cost_field_demo,
    random_clutter,
    recursive_maze,
)
from .harness import ConfigError, SweepConfig, plan, run_sweep, write_aggregate, write_records
from .oracles import GridSpec, grid_dijkstra
from .planners import PlannerConfig
from .problem import ProblemDef
from .smoothing import SmoothParams, adaptive_shortcut

ALGOS = ("fmt", "fmt-knn", "prm", "rrt", "oracle")


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_plan(args) -> int:
    problem = ProblemDef.load(args.problem)
    cfg = PlannerConfig(eta=args.eta, rm=args.rm if args.rm is not None else 1.0, k0=args.k0)
    result = plan(args.algo, problem, args.n, args.seed, cfg)
    out = result.to_dict()
    if args.smooth and result.success:
        path = adaptive_shortcut(result.path, problem.world, problem.cost, SmoothParams(seed=args.seed), stats=result.stats)
        out["smoothed_path"] = path.tolist()
        out["smoothed_cost"] = path_cost(problem.cost, path)
        out["stats"] = result.stats.to_dict()
    out["problem"] = problem.name
    out["n"] = args.n
    out["seed"] = args.seed
    _emit(out, args.out)
    return 0


def cmd_bench(args) -> int:
    try:
        cfg = SweepConfig.load(args.config)
        if args.smooth:
            cfg.smooth = True
        records, rows = run_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_records(records, out / "records.csv")
    write_aggregate(rows, out / "aggregate.csv")
    print(f"{len(records)} records, {len(rows)} aggregate rows -> {out}")
    return 0


def cmd_env(args) -> int:
    if args.kind == "maze":
        problem = recursive_maze(MazeSpec(dim=args.dim))
    elif args.kind == "bugtrap":
        problem = bug_trap_2d(BugTrapSpec())
    elif args.kind == "clutter":
        problem = random_clutter(ClutterSpec(dim=args.dim), args.seed)
    else:
        problem = cost_field_demo(args.variant)
    if args.out:
        problem.save(args.out)
    else:
        print(json.dumps(problem.to_dict(), indent=2))
    return 0


def cmd_oracle(args) -> int:
    problem = ProblemDef.load(args.problem)
    cost = grid_dijkstra(problem, GridSpec(args.res, args.connectivity))
    _emit({"problem": problem.name, "resolution": args.res, "connectivity": args.connectivity, "cost": cost}, None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fmtstar", description="Sampling-based optimal motion planning")
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("plan", help="run one planner on a problem file")
    pl.add_argument("--problem", required=True)
    pl.add_argument("--algo", choices=ALGOS, default="fmt")
    pl.add_argument("--n", type=int, default=1000, help="samples (iterations for rrt)")
    pl.add_argument("--seed", type=int, default=0)
    knob = pl.add_mutually_exclusive_group()
    knob.add_argument("--eta", type=float)
    knob.add_argument("--rm", type=float, help="connection radius multiplier")
    knob.add_argument("--k0", type=float, help="k-nearest constant")
    pl.add_argument("--out")
    pl.add_argument("--smooth", action="store_true")
    pl.set_defaults(func=cmd_plan)

    be = sub.add_parser("bench", help="run a sweep from a JSON config")
    be.add_argument("--config", required=True)
    be.add_argument("--out-dir", required=True)
    be.add_argument("--smooth", action="store_true")
    be.set_defaults(func=cmd_bench)

    env = sub.add_parser("env", help="benchmark environments")
    env_sub = env.add_subparsers(dest="env_command", required=True)
    gen = env_sub.add_parser("gen", help="write a generated problem")
    gen.add_argument("--kind", choices=("maze", "bugtrap", "clutter", "costfield"), required=True)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--variant", choices=COST_FIELD_KINDS, default="high-cost-block")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_env)

    orc = sub.add_parser("oracle", help="reference solutions")
    orc_sub = orc.add_subparsers(dest="oracle_command", required=True)
    grid = orc_sub.add_parser("grid", help="grid Dijkstra cost")
    grid.add_argument("--problem", required=True)
    grid.add_argument("--res", type=int, default=256)
    grid.add_argument("--connectivity", choices=("axis-neighbors", "full-diagonal"), default="full-diagonal")
    grid.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
