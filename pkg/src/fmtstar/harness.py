"""Batch experiments: trials, sweeps, aggregation and CSV output.

Trial ``i`` of a sweep uses seed ``seed_base + i``. All sampling-based
planners in one (problem, n, seed) cell share a single sample set, so
their results are paired. For RRT* the ``n`` column is the iteration count.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .costs import path_cost
from .environments import (
    BugTrapSpec,
    ClutterSpec,
    MazeSpec,
    bug_trap_2d,
    cost_field_demo,
    random_clutter,
    recursive_maze,
)
from .planners import (
    PlannerConfig,
    PlanResult,
    disk_graph_shortest_path,
    fmt_plan,
    neighborhood,
    prepare_samples,
    prm_star_plan,
    rrt_star_plan,
)
from .problem import ProblemDef
from .smoothing import SmoothParams, adaptive_shortcut

ALGORITHMS = ("fmt", "fmt-knn", "prm", "prm-knn", "rrt", "oracle")
CSV_COLUMNS = (
    "algorithm",
    "problem",
    "n",
    "seed",
    "success",
    "cost",
    "time_ms",
    "collision_checks",
    "cost_evals",
    "iterations",
    "smoothed",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrialRecord:
    algorithm: str
    problem: str
    n: int
    seed: int
    success: bool
    cost: float
    time_ms: float
    collision_checks: int
    cost_evals: int
    iterations: int
    smoothed: bool

    def __post_init__(self):
        if self.success != math.isfinite(self.cost):
            raise ValueError("cost must be finite exactly when the trial succeeded")

    def same_outcome(self, other: "TrialRecord") -> bool:
        """Equality ignoring wall time."""
        a, b = asdict(self), asdict(other)
        a.pop("time_ms")
        b.pop("time_ms")
        return a == b


def _config_for(algorithm: str, base: PlannerConfig | None) -> PlannerConfig:
    cfg = base or PlannerConfig()
    variant = "knn" if algorithm.endswith("-knn") else "radial"
    if cfg.variant != variant:
        cfg = PlannerConfig(**{**asdict(cfg), "variant": variant})
    return cfg


def plan(algorithm: str, problem: ProblemDef, n: int, seed: int, config: PlannerConfig | None = None, samples=None) -> PlanResult:
    """Dispatch one planner run."""
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    cfg = _config_for(algorithm, config)
    if algorithm == "rrt":
        return rrt_star_plan(problem, cfg, seed=seed, n_iterations=n)
    samples = prepare_samples(problem, samples, n, seed, cfg)
    if algorithm in ("fmt", "fmt-knn"):
        return fmt_plan(problem, samples, cfg)
    if algorithm in ("prm", "prm-knn"):
        return prm_star_plan(problem, samples, cfg)
    if samples.n_eff < 2:
        return fmt_plan(problem, samples, cfg)
    r, _ = neighborhood(problem, samples, cfg)
    return disk_graph_shortest_path(problem, samples, r, prune_obstacle_edges=True)


def run_trial(
    algorithm: str,
    problem: ProblemDef,
    n: int,
    seed: int,
    config: PlannerConfig | None = None,
    smooth: bool = False,
    samples=None,
    smooth_params: SmoothParams | None = None,
) -> TrialRecord:
    t0 = time.perf_counter()
    result = plan(algorithm, problem, n, seed, config, samples)
    cost = result.cost
    checks = result.stats.collision_checks
    if smooth and result.success and result.path.shape[0] > 2:
        params = smooth_params or SmoothParams(seed=seed)
        path = adaptive_shortcut(result.path, problem.world, problem.cost, params, stats=result.stats)
        cost = path_cost(problem.cost, path)
        checks += result.stats.smoothing_collision_checks
    elapsed = (time.perf_counter() - t0) * 1000.0
    return TrialRecord(
        algorithm,
        problem.name,
        int(n),
        int(seed),
        bool(result.success),
        float(cost),
        elapsed,
        int(checks),
        int(result.stats.cost_evaluations),
        int(result.stats.iterations),
        bool(smooth),
    )


# --------------------------------------------------------------------------
# sweeps


def problem_from_source(src: dict) -> ProblemDef:
    kind = src.get("kind", "file")
    try:
        if kind == "file":
            return ProblemDef.load(src["file"])
        if kind == "maze":
            return recursive_maze(MazeSpec(**{k: v for k, v in src.items() if k in {f.name for f in fields(MazeSpec)}}))
        if kind == "bugtrap":
            return bug_trap_2d(BugTrapSpec())
        if kind == "clutter":
            keys = {f.name for f in fields(ClutterSpec)}
            return random_clutter(ClutterSpec(**{k: v for k, v in src.items() if k in keys}), int(src.get("seed", 0)))
        if kind == "costfield":
            return cost_field_demo(src.get("variant", "high-cost-block"))
    except (KeyError, TypeError, OSError) as exc:
        raise ConfigError(f"bad problem source {src}: {exc}") from exc
    raise ConfigError(f"unknown problem kind {kind!r}")


@dataclass
class SweepConfig:
    problems: list
    algorithms: list
    sample_counts: list
    trials: int = 50
    seed_base: int = 0
    planner: dict = field(default_factory=dict)
    smooth: bool = False
    workers: int = 1

    def __post_init__(self):
        if not self.problems or not self.algorithms or not self.sample_counts:
            raise ConfigError("problems, algorithms and sample_counts must be nonempty")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}")
        if any(int(n) < 0 for n in self.sample_counts):
            raise ConfigError("sample counts must be nonnegative")
        if self.trials < 1 or self.workers < 1:
            raise ConfigError("trials and workers must be positive")
        for key in self.planner:
            if key not in ALGORITHMS:
                raise ConfigError(f"planner settings for unknown algorithm {key!r}")
        for p in self.problems:
            if not isinstance(p, dict):
                raise ConfigError("each problem source must be an object")

    def planner_config(self, algorithm: str) -> PlannerConfig:
        try:
            return _config_for(algorithm, PlannerConfig(**self.planner.get(algorithm, {})))
        except TypeError as exc:
            raise ConfigError(f"bad planner settings for {algorithm}: {exc}") from exc

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        for a in cfg.algorithms:
            cfg.planner_config(a)
        return cfg

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read sweep config: {exc}") from exc
        return cls.from_dict(data)


def _run_cell(args) -> list[TrialRecord]:
    cfg, src, n, seed = args
    problem = problem_from_source(src)
    if "id" in src:
        problem = ProblemDef(problem.world, problem.x_init, problem.goal, problem.cost, problem.sampling, src["id"], problem.provenance)
    shared = {}
    out = []
    for a in cfg.algorithms:
        pc = cfg.planner_config(a)
        samples = None
        if a != "rrt":
            key = pc.goal_samples
            if key not in shared:
                shared[key] = prepare_samples(problem, None, n, seed, pc)
            samples = shared[key]
        out.append(run_trial(a, problem, n, seed, pc, cfg.smooth, samples))
    return out


def run_sweep(config: SweepConfig) -> tuple[list[TrialRecord], list[dict]]:
    cells = [
        (config, src, int(n), config.seed_base + t)
        for src in config.problems
        for n in config.sample_counts
        for t in range(config.trials)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(_run_cell, cells))
    else:
        chunks = [_run_cell(c) for c in cells]
    records = [r for chunk in chunks for r in chunk]
    return records, aggregate(records)


def _mean_se(values) -> tuple[float, float, bool]:
    """Mean, standard error and whether the error is undefined (one value)."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return math.nan, math.nan, True
    if v.size == 1:
        return float(v[0]), 0.0, True
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size)), False


def aggregate(records) -> list[dict]:
    groups: dict = {}
    for r in records:
        groups.setdefault((r.algorithm, r.problem, r.n), []).append(r)
    rows = []
    for (alg, prob, n) in sorted(groups):
        rs = groups[(alg, prob, n)]
        ok = [r for r in rs if r.success]
        mean_cost, se_cost, cost_flag = _mean_se([r.cost for r in ok])
        mean_t, se_t, t_flag = _mean_se([r.time_ms for r in rs])
        rate = len(ok) / len(rs)
        rows.append(
            {
                "algorithm": alg,
                "problem": prob,
                "n": n,
                "trials": len(rs),
                "successes": len(ok),
                "success_rate": rate,
                "mean_cost": mean_cost if ok else None,
                "stderr_cost": se_cost if ok else None,
                "stderr_cost_undefined": cost_flag,
                "mean_time_ms": mean_t,
                "stderr_time_ms": se_t,
                "mean_collision_checks": float(np.mean([r.collision_checks for r in rs])),
                "mean_cost_evals": float(np.mean([r.cost_evals for r in rs])),
                "mean_iterations": float(np.mean([r.iterations for r in rs])),
                "plotted": rate >= 0.5,
            }
        )
    return rows


# --------------------------------------------------------------------------
# CSV


def write_records(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(
                [
                    r.algorithm,
                    r.problem,
                    r.n,
                    r.seed,
                    int(r.success),
                    repr(r.cost) if r.success else "",
                    repr(r.time_ms),
                    r.collision_checks,
                    r.cost_evals,
                    r.iterations,
                    int(r.smoothed),
                ]
            )


def read_records(path) -> list[TrialRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                TrialRecord(
                    row["algorithm"],
                    row["problem"],
                    int(row["n"]),
                    int(row["seed"]),
                    bool(int(row["success"])),
                    float(row["cost"]) if row["cost"] else math.inf,
                    float(row["time_ms"]),
                    int(row["collision_checks"]),
                    int(row["cost_evals"]),
                    int(row["iterations"]),
                    bool(int(row["smoothed"])),
                )
            )
    return out


def write_aggregate(rows, path) -> None:
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else v) for k, v in row.items()})
