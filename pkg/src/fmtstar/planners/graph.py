"""Exact shortest paths on the r-disk graph of a sample set.

This is the reference the FMT* equivalence checks compare against, so it
shares no neighbor-search or graph code with the planners: neighbors come
from a brute-force distance scan and the search is a plain binary-heap
Dijkstra.
"""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from ..geometry import segments_collision_free
from ..problem import ProblemDef
from ..sampling import SampleSet
from .common import PlanResult, Stats, failure

_CHUNK = 512


def disk_graph_edges(points: np.ndarray, r: float, cost) -> list[list[tuple[int, float]]]:
    """Adjacency lists of ``{(u, v) : Cost(u, v) < r}`` by brute force."""
    N = points.shape[0]
    adj: list[list[tuple[int, float]]] = [[] for _ in range(N)]
    for s in range(0, N, _CHUNK):
        rows = np.arange(s, min(N, s + _CHUNK))
        for u in rows.tolist():
            if u + 1 >= N:
                continue
            others = np.arange(u + 1, N)
            d = cost.pair_costs(points[u], points[others])
            for v, w in zip(others[d < r].tolist(), d[d < r].tolist()):
                adj[u].append((v, w))
                adj[v].append((u, w))
    return adj


def disk_graph_shortest_path(
    problem: ProblemDef,
    samples: SampleSet,
    r: float,
    prune_obstacle_edges: bool = True,
) -> PlanResult:
    """Dijkstra from ``x_init`` to the cheapest sample inside the goal."""
    t0 = time.perf_counter()
    pts = samples.points
    N = pts.shape[0]
    stats = Stats(n_samples=samples.n_eff)
    if problem.goal.contains(pts[0]):
        return PlanResult(True, pts[:1].copy(), 0.0, stats, goal_index=0, radius=r, algorithm="oracle")
    adj = disk_graph_edges(pts, r, problem.cost)
    if prune_obstacle_edges:
        a = np.array([u for u in range(N) for v, _ in adj[u] if u < v], dtype=np.intp)
        b = np.array([v for u in range(N) for v, _ in adj[u] if u < v], dtype=np.intp)
        blocked = set()
        if a.size:
            ok = segments_collision_free(pts[a], pts[b], problem.world, problem.wrap)
            blocked = {(int(x), int(y)) for x, y in zip(a[~ok], b[~ok])}
            stats.collision_checks = int(a.size)
        adj = [[(v, w) for v, w in nb if (min(u, v), max(u, v)) not in blocked] for u, nb in enumerate(adj)]

    dist = [math.inf] * N
    prev = [-1] * N
    dist[0] = 0.0
    heap = [(0.0, 0)]
    done = [False] * N
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        stats.iterations += 1
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    in_goal = problem.goal.contains_many(pts)
    stats.wall_time = time.perf_counter() - t0
    best, end = math.inf, -1
    for v in np.flatnonzero(in_goal).tolist():
        if dist[v] < best:
            best, end = dist[v], v
    if end < 0:
        return failure(stats, problem.dim, radius=r, algorithm="oracle")
    chain = [end]
    while chain[-1] != 0:
        chain.append(prev[chain[-1]])
    return PlanResult(True, pts[chain[::-1]], best, stats, radius=r, goal_index=end, algorithm="oracle")
