"""Fast Marching Tree (FMT*), radial and k-nearest variants."""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from ..geometry import CollisionChecker
from ..neighbors import build_index
from ..problem import ProblemDef
from ..sampling import SampleSet
from .common import (
    PlannerConfig,
    PlanResult,
    Stats,
    failure,
    neighborhood,
    path_from_parents,
    prepare_samples,
)

UNVISITED, OPEN, CLOSED, PENDING = 0, 1, 2, 3


def fmt_plan(
    problem: ProblemDef,
    samples: SampleSet | None = None,
    config: PlannerConfig | None = None,
    *,
    n: int | None = None,
    seed: int | None = None,
) -> PlanResult:
    """Run FMT* on ``samples`` (drawn from ``n`` and ``seed`` when omitted).

    The tree grows outward in cost-to-arrive order. Each unvisited
    neighbor ``x`` of the current node ``z`` is connected to its cheapest
    open neighbor ``y_min``; only that single edge is collision checked.
    New open nodes join the heap after the whole neighborhood of ``z`` is
    processed.
    """
    config = config or PlannerConfig()
    t0 = time.perf_counter()
    samples = prepare_samples(problem, samples, n, seed, config)
    stats = Stats(n_samples=samples.n_eff)
    name = "fmt-knn" if config.variant == "knn" else "fmt"
    pts = samples.points
    N = pts.shape[0]
    dim = problem.dim

    if problem.goal.contains(pts[0]):
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(True, pts[:1].copy(), 0.0, stats, goal_index=0, algorithm=name)
    if samples.n_eff < 2:
        stats.wall_time = time.perf_counter() - t0
        return failure(stats, dim, algorithm=name)

    r, k = neighborhood(problem, samples, config)
    index = build_index(pts, problem.cost)
    if config.variant == "knn":
        near_z = lambda v: index.mutual_knn(v, k)  # noqa: E731
        near_x = lambda v: index.knn(v, k)  # noqa: E731
    else:
        index.precompute_radius(r)
        near_z = near_x = lambda v: index.radius(v, r)  # noqa: E731

    checker = CollisionChecker(problem.world, problem.wrap)
    in_goal = problem.goal.contains_many(pts)
    state = np.zeros(N, dtype=np.int8)
    cost = np.full(N, math.inf)
    parent = np.full(N, -1, dtype=np.intp)
    memo: dict[int, bool] = {}
    checks = 0

    trace = None
    if config.trace:
        trace = {"z_costs": [], "admissions": np.zeros(N, dtype=np.int64)}
        trace["admissions"][0] = 1

    z = 0
    state[0] = OPEN
    cost[0] = 0.0
    heap: list[tuple[float, int]] = []
    while not in_goal[z]:
        stats.iterations += 1
        if trace is not None:
            trace["z_costs"].append(cost[z])
        nz = near_z(z)
        x_near = nz.idx[state[nz.idx] == UNVISITED]
        opened = []
        for x in x_near.tolist():
            nx = near_x(x)
            mask = state[nx.idx] == OPEN
            if not mask.any():
                continue
            ys = nx.idx[mask]
            totals = cost[ys] + nx.dist[mask]
            best = totals.min()
            y = int(ys[totals == best].min())
            key = y * N + x if y < x else x * N + y
            ok = memo.get(key) if config.cache_collisions else None
            if ok is None:
                ok = checker.free(pts[y], pts[x])
                checks += 1
                memo[key] = ok
            if ok:
                parent[x] = y
                cost[x] = best
                state[x] = PENDING
                opened.append(x)
        for x in opened:
            state[x] = OPEN
            heapq.heappush(heap, (cost[x], x))
            if trace is not None:
                trace["admissions"][x] += 1
        state[z] = CLOSED
        if not heap:
            stats.collision_checks = checks
            stats.cost_evaluations = index.cost_evaluations
            stats.near_computations = index.near_computations
            stats.wall_time = time.perf_counter() - t0
            return failure(stats, dim, radius=r, k=k, trace=trace, algorithm=name,
                           parent=parent if config.keep_tree else None,
                           cost_to_arrive=cost if config.keep_tree else None)
        _, z = heapq.heappop(heap)

    if trace is not None:
        trace["z_costs"].append(cost[z])
    stats.collision_checks = checks
    stats.cost_evaluations = index.cost_evaluations
    stats.near_computations = index.near_computations
    stats.wall_time = time.perf_counter() - t0
    return PlanResult(
        True,
        path_from_parents(parent, pts, z),
        float(cost[z]),
        stats,
        radius=r,
        k=k,
        goal_index=z,
        parent=parent if config.keep_tree else None,
        cost_to_arrive=cost if config.keep_tree else None,
        trace=trace,
        algorithm=name,
    )
