"""k-nearest RRT* baseline.

Steering extends at most ``steer_fraction * sqrt(d)`` toward the sample,
5% of samples are drawn from the goal by default, and the rewiring
neighborhood is the ``ceil(k0_rrt log |V|)`` nearest tree nodes. Samples
whose initial steering segment collides are discarded.
"""

from __future__ import annotations

import math
import time

import numpy as np

from ..geometry import CollisionChecker, points_free, wrapped_delta
from ..problem import ProblemDef
from ..sampling import STREAM_RRT, make_rng
from .common import PlannerConfig, PlanResult, Stats, default_k0_rrt, failure, path_from_parents


def _goal_point(rng, goal) -> np.ndarray:
    lo, hi = goal.bounds()
    for _ in range(1000):
        x = lo + rng.random(lo.shape[0]) * (hi - lo)
        if goal.contains(x):
            return x
    return goal.center.copy() if goal.kind == "ball" else 0.5 * (goal.lo + goal.hi)


def rrt_star_plan(
    problem: ProblemDef,
    config: PlannerConfig | None = None,
    seed: int = 0,
    n_iterations: int = 1000,
) -> PlanResult:
    config = config or PlannerConfig()
    t0 = time.perf_counter()
    stats = Stats()
    d = problem.dim
    x0 = problem.x_init
    if problem.goal.contains(x0):
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(True, x0[None, :].copy(), 0.0, stats, goal_index=0, algorithm="rrt")

    rng = make_rng(seed, STREAM_RRT)
    world = problem.world
    wrap = problem.wrap
    checker = CollisionChecker(world, wrap)
    model = problem.cost
    k0 = default_k0_rrt(d) if config.k0_rrt is None else config.k0_rrt
    step = config.steer_fraction * math.sqrt(d)

    cap = n_iterations + 1
    V = np.empty((cap, d))
    V[0] = x0
    parent = np.full(cap, -1, dtype=np.intp)
    cost = np.full(cap, math.inf)
    cost[0] = 0.0
    children: list[list[int]] = [[] for _ in range(cap)]
    in_goal = np.zeros(cap, dtype=bool)
    m = 1
    checks = 0
    evals = 0

    def edge_cost(a, B):
        nonlocal evals
        evals += B.shape[0]
        return model.pair_costs(a, B)

    for _ in range(n_iterations):
        stats.iterations += 1
        if rng.random() < config.goal_bias:
            target = _goal_point(rng, problem.goal)
        else:
            target = rng.random(d)
        delta = wrapped_delta(V[:m], target, wrap)
        dist2 = np.einsum("ij,ij->i", delta, delta)
        near_i = int(np.argmin(dist2))
        gap = math.sqrt(dist2[near_i])
        if gap == 0.0:
            continue
        x_new = V[near_i] + delta[near_i] * min(1.0, step / gap)
        if wrap is not None:
            x_new = np.where(wrap, np.mod(x_new, 1.0), x_new)
        if not points_free(x_new[None, :], world)[0]:
            continue
        checks += 1
        if not checker.free(V[near_i], x_new):
            continue

        k = min(m, max(1, math.ceil(k0 * math.log(m + 1))))
        dn = wrapped_delta(V[:m], x_new, wrap)
        dd = np.einsum("ij,ij->i", dn, dn)
        nbrs = np.argpartition(dd, k - 1)[:k] if k < m else np.arange(m)
        nbrs = nbrs[np.lexsort((nbrs, dd[nbrs]))]
        c_edge = edge_cost(x_new, V[nbrs])
        through = cost[nbrs] + c_edge

        # best parent: cheapest collision-free candidate, nearest fallback known free
        best_p, best_c = near_i, cost[near_i] + float(model.pair_costs(V[near_i], x_new[None, :])[0])
        evals += 1
        for j in np.argsort(through, kind="stable").tolist():
            cand = int(nbrs[j])
            if through[j] >= best_c:
                break
            if cand == near_i:
                best_p, best_c = cand, float(through[j])
                break
            checks += 1
            if checker.free(V[cand], x_new):
                best_p, best_c = cand, float(through[j])
                break

        v = m
        V[v] = x_new
        parent[v] = best_p
        cost[v] = best_c
        children[best_p].append(v)
        in_goal[v] = problem.goal.contains(x_new)
        m += 1

        # rewire
        for j in range(nbrs.shape[0]):
            u = int(nbrs[j])
            if u == best_p:
                continue
            new_c = best_c + c_edge[j]
            if new_c < cost[u]:
                checks += 1
                if checker.free(x_new, V[u]):
                    children[parent[u]].remove(u)
                    parent[u] = v
                    children[v].append(u)
                    shift = new_c - cost[u]
                    stack = [u]
                    while stack:
                        w = stack.pop()
                        cost[w] += shift
                        stack.extend(children[w])

    stats.collision_checks = checks
    stats.cost_evaluations = evals
    stats.n_samples = m - 1
    stats.wall_time = time.perf_counter() - t0
    goal_nodes = np.flatnonzero(in_goal[:m])
    if goal_nodes.size == 0:
        return failure(stats, d, algorithm="rrt")
    best = goal_nodes[np.argmin(cost[goal_nodes])]
    path = path_from_parents(parent, V, int(best))
    return PlanResult(True, path, float(cost[best]), stats, goal_index=int(best), algorithm="rrt")
