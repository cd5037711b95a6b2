"""PRM*: build the whole neighbor graph, check every edge, then Dijkstra."""

from __future__ import annotations

import time

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ..geometry import CollisionChecker
from ..neighbors import build_index
from ..problem import ProblemDef
from ..sampling import SampleSet
from .common import PlannerConfig, PlanResult, Stats, failure, neighborhood, prepare_samples

_PAD = 1e-9


def _radius_edges(index, r: float) -> tuple[np.ndarray, np.ndarray]:
    cost = index.cost
    if cost.kind == "field":
        pairs = index.tree.query_pairs(cost.euclidean_reach(r) * (1 + _PAD), output_type="ndarray")
    else:
        pairs = index.tree.query_pairs(r * (1 + _PAD), output_type="ndarray")
    if pairs.shape[0] == 0:
        return pairs.reshape(0, 2), np.zeros(0)
    pts = index.points
    w = cost.segment_costs(pts[pairs[:, 0]], pts[pairs[:, 1]])
    keep = w < r
    return pairs[keep], w[keep]


def _knn_edges(index, k: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols, ws = [], [], []
    for v in range(index.N):
        ns = index.knn(v, k)
        rows.append(np.full(len(ns), v))
        cols.append(ns.idx)
        ws.append(ns.dist)
    a = np.concatenate(rows)
    b = np.concatenate(cols)
    w = np.concatenate(ws)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    key = lo * index.N + hi
    _, first = np.unique(key, return_index=True)
    return np.stack([lo[first], hi[first]], axis=1), w[first]


def prm_star_plan(
    problem: ProblemDef,
    samples: SampleSet | None = None,
    config: PlannerConfig | None = None,
    *,
    n: int | None = None,
    seed: int | None = None,
) -> PlanResult:
    """PRM* on the same samples and neighborhood rule FMT* would use."""
    config = config or PlannerConfig()
    t0 = time.perf_counter()
    samples = prepare_samples(problem, samples, n, seed, config)
    stats = Stats(n_samples=samples.n_eff)
    name = "prm-knn" if config.variant == "knn" else "prm"
    pts = samples.points
    N = pts.shape[0]
    if problem.goal.contains(pts[0]):
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(True, pts[:1].copy(), 0.0, stats, goal_index=0, algorithm=name)
    if samples.n_eff < 2:
        stats.wall_time = time.perf_counter() - t0
        return failure(stats, problem.dim, algorithm=name)

    r, k = neighborhood(problem, samples, config)
    index = build_index(pts, problem.cost)
    if config.variant == "knn":
        edges, w = _knn_edges(index, k)
    else:
        edges, w = _radius_edges(index, r)
    stats.near_computations = N
    stats.cost_evaluations = edges.shape[0]
    stats.collision_checks = edges.shape[0]
    stats.iterations = N
    ok = CollisionChecker(problem.world, problem.wrap).free_many(pts[edges[:, 0]], pts[edges[:, 1]]) if edges.size else np.zeros(0, bool)
    edges, w = edges[ok], w[ok]

    graph = coo_matrix((w, (edges[:, 0], edges[:, 1])), shape=(N, N)).tocsr()
    dist, pred = dijkstra(graph, directed=False, indices=0, return_predecessors=True)
    goal = np.flatnonzero(problem.goal.contains_many(pts))
    stats.wall_time = time.perf_counter() - t0
    if goal.size == 0 or not np.isfinite(dist[goal]).any():
        return failure(stats, problem.dim, radius=r, k=k, algorithm=name)
    best = dist[goal].min()
    end = int(goal[dist[goal] == best].min())
    chain = [end]
    while chain[-1] != 0:
        chain.append(int(pred[chain[-1]]))
    path = pts[chain[::-1]]
    stats.wall_time = time.perf_counter() - t0
    return PlanResult(True, path, float(best), stats, radius=r, k=k, goal_index=end, algorithm=name)
