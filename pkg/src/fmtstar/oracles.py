"""Brute-force references: grid Dijkstra, exhaustive path search and the
hand-built instance on which lazy collision checking is suboptimal."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import Aabb, GoalRegion, World, points_free, segment_collision_free, segments_collision_free
from .problem import ProblemDef
from .sampling import SampleSet


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    resolution: int | tuple = 256
    connectivity: str = "full-diagonal"

    def __post_init__(self):
        res = np.atleast_1d(np.asarray(self.resolution, dtype=int))
        if np.any(res < 16):
            raise OracleError("grid resolution must be at least 16 per axis")
        if self.connectivity not in ("axis-neighbors", "full-diagonal"):
            raise OracleError(f"unknown connectivity {self.connectivity!r}")


# worst-case ratio of grid length to Euclidean length in 2D
METRICATION = {"axis-neighbors": math.sqrt(2.0), "full-diagonal": 1.0 / math.cos(math.pi / 8.0)}


def grid_free_cells(world: World, res: np.ndarray) -> np.ndarray:
    """Cells whose closed extent overlaps no obstacle interior."""
    free = np.ones(tuple(res), dtype=bool)
    for o in world.obstacles:
        # cell i spans [i / res, (i + 1) / res]; blocked when the overlap has positive width
        first = np.floor(o.lo * res).astype(int)
        last = np.ceil(o.hi * res).astype(int)
        first = np.clip(first, 0, res)
        last = np.clip(last, 0, res)
        if np.any(last <= first) or np.any(o.hi <= o.lo):
            continue
        free[tuple(slice(a, b) for a, b in zip(first, last))] = False
    return free


def grid_dijkstra(problem: ProblemDef, spec: GridSpec | None = None) -> float:
    """Shortest grid-path cost from ``x_init`` to the goal (``inf`` if infeasible).

    Moves join cell centres. A diagonal move is allowed only when every cell
    of the block it spans is free, so each move is a collision-free
    segment. The result overestimates the continuous optimum by at most
    the metrication factor of the connectivity.
    """
    spec = spec or GridSpec()
    world = problem.world
    d = world.dim
    res = np.broadcast_to(np.atleast_1d(np.asarray(spec.resolution, dtype=int)), (d,)).copy()
    if spec.connectivity == "full-diagonal" and d > 3:
        raise OracleError("full-diagonal connectivity is limited to d <= 3")
    if np.prod(res.astype(float)) > 4e6:
        raise OracleError("grid too large")
    free = grid_free_cells(world, res)
    # pad by one blocked layer so shifted views never wrap
    padded = np.zeros(tuple(res + 2), dtype=bool)
    padded[tuple(slice(1, -1) for _ in range(d))] = free
    ids = np.arange(padded.size).reshape(padded.shape)
    inner = tuple(slice(1, -1) for _ in range(d))
    centres_axes = [(np.arange(r) + 0.5) / r for r in res]

    if spec.connectivity == "axis-neighbors":
        moves = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    else:
        moves = [m for m in itertools.product((-1, 0, 1), repeat=d) if next((c for c in m if c), 0) > 0]
    rows, cols, ws = [], [], []
    for m in moves:
        block = [s for s in itertools.product(*[(0, c) if c else (0,) for c in m])]
        ok = np.ones(tuple(res), dtype=bool)
        for s in block:
            sl = tuple(slice(1 + s[i], 1 + s[i] + res[i]) for i in range(d))
            ok &= padded[sl]
        src = ids[inner][ok]
        dst_sl = tuple(slice(1 + m[i], 1 + m[i] + res[i]) for i in range(d))
        dst = ids[dst_sl][ok]
        step = np.array(m, dtype=float) / res
        if problem.cost.kind == "euclidean":
            w = np.full(src.shape[0], float(np.linalg.norm(step)))
        else:
            cells = np.argwhere(ok)
            a = np.stack([centres_axes[i][cells[:, i]] for i in range(d)], axis=1)
            w = problem.cost.segment_costs(a, a + step)
        rows.append(src)
        cols.append(dst)
        ws.append(w)
    graph = coo_matrix((np.concatenate(ws), (np.concatenate(rows), np.concatenate(cols))), shape=(padded.size,) * 2).tocsr()

    x0 = problem.x_init
    start_cell = np.minimum((x0 * res).astype(int), res - 1)
    if not free[tuple(start_cell)]:
        return math.inf
    start_centre = (start_cell + 0.5) / res
    grids = np.meshgrid(*centres_axes, indexing="ij")
    centres = np.stack([g.ravel() for g in grids], axis=1)
    goal_mask = problem.goal.contains_many(centres).reshape(tuple(res)) & free
    if not goal_mask.any():
        gc = problem.goal.center if problem.goal.kind == "ball" else 0.5 * (problem.goal.lo + problem.goal.hi)
        cell = np.minimum((gc * res).astype(int), res - 1)
        if not free[tuple(cell)]:
            return math.inf
        goal_mask[tuple(cell)] = True
    dist = dijkstra(graph, directed=False, indices=int(ids[tuple(start_cell + 1)]))
    goal_ids = ids[inner][goal_mask]
    best = float(dist[goal_ids].min())
    if not math.isfinite(best):
        return math.inf
    lead = float(problem.cost.segment_costs(x0[None, :], start_centre[None, :])[0])
    return lead + best


def exhaustive_shortest_path(samples: SampleSet, r: float, problem: ProblemDef) -> float:
    """Cheapest simple path in the collision-pruned ``r``-disk graph (n <= 20)."""
    pts = samples.points
    N = pts.shape[0]
    if N > 21:
        raise OracleError("exhaustive search is limited to 20 samples plus x_init")
    in_goal = problem.goal.contains_many(pts)
    if in_goal[0]:
        return 0.0
    W = np.full((N, N), math.inf)
    for u in range(N):
        for v in range(u + 1, N):
            c = float(problem.cost.segment_costs(pts[u][None, :], pts[v][None, :])[0])
            if c < r and segment_collision_free(pts[u], pts[v], problem.world, problem.wrap):
                W[u, v] = W[v, u] = c
    best = math.inf
    visited = np.zeros(N, dtype=bool)

    def dfs(u, acc):
        nonlocal best
        if acc >= best:
            return
        if in_goal[u]:
            best = acc
            return
        visited[u] = True
        for v in np.flatnonzero(np.isfinite(W[u]) & ~visited).tolist():
            dfs(v, acc + W[u, v])
        visited[u] = False

    dfs(0, 0.0)
    return best


# --------------------------------------------------------------------------
# suboptimal lazy connection


LAZY_NODES = {
    "x_init": (0.1, 0.5),
    "u1": (0.3, 0.5),
    "u2": (0.35, 0.62),
    "w": (0.62, 0.55),
    "x": (0.55, 0.75),
}
LAZY_OBSTACLE = Aabb([0.44, 0.675], [0.46, 0.78])
LAZY_RADIUS = 0.4
LAZY_VARIANTS = ("base", "no-obstacle", "u2-not-costlier", "u2-not-cheaper")


def figure3_instance(variant: str = "base") -> tuple[ProblemDef, SampleSet, float]:
    """Five-node instance where lazy checking connects ``x`` suboptimally.

    Nodes are ``x_init, u1, u2, w, x`` (indices 0..4); ``x`` is the goal.
    In the base variant all four conditions hold:

    (a) ``|u2 - x| < r``;
    (b) ``c(u2) > c(u1)``, so ``u1`` is expanded first;
    (c) ``c(u2) + Cost(u2, x) < c(u1) + Cost(u1, x)``, so ``u2`` is the
        locally best parent of ``x``;
    (d) the segment ``u2 x`` is blocked.

    FMT* tries ``u2`` from ``u1``'s expansion, fails, and later reaches
    ``x`` through the detour node ``w``. Each other variant breaks one
    condition: ``no-obstacle`` (d), ``u2-not-costlier`` (b) and
    ``u2-not-cheaper`` (c).
    """
    nodes = dict(LAZY_NODES)
    obstacles = (LAZY_OBSTACLE,)
    if variant == "no-obstacle":
        obstacles = ()
    elif variant == "u2-not-costlier":
        nodes["u1"] = (0.45, 0.42)
    elif variant == "u2-not-cheaper":
        nodes["u2"] = (0.25, 0.75)
    elif variant != "base":
        raise OracleError(f"unknown variant {variant!r}; choose from {LAZY_VARIANTS}")
    world = World(2, obstacles)
    pts = np.array([nodes[k] for k in ("x_init", "u1", "u2", "w", "x")], dtype=float)
    problem = ProblemDef(world, pts[0], GoalRegion.ball(pts[4], 0.01), name=f"lazy-connection-{variant}")
    samples = SampleSet(pts, 4, seed=None, goal_flags=[False, False, False, False, True])
    return problem, samples, LAZY_RADIUS


def figure3_conditions(problem: ProblemDef, samples: SampleSet, r: float) -> dict:
    """Evaluate conditions (a)-(d) on an instance from :func:`figure3_instance`."""
    p = samples.points
    x0, u1, u2, x = p[0], p[1], p[2], p[4]

    def cost(a, b):
        return float(np.linalg.norm(b - a))

    # both u's connect straight to x_init in these instances
    c1, c2 = cost(x0, u1), cost(x0, u2)
    return {
        "a": cost(u2, x) < r,
        "b": c2 > c1,
        "c": c2 + cost(u2, x) < c1 + cost(u1, x),
        "d": not segment_collision_free(u2, x, problem.world),
        "direct": cost(x0, u1) < r and cost(x0, u2) < r
        and segment_collision_free(x0, u1, problem.world)
        and segment_collision_free(x0, u2, problem.world),
    }


# --------------------------------------------------------------------------
# complete straight-line graph


def complete_graph_oracle(problem: ProblemDef, resolution: int = 33, extra_points=None, goal_points: int = 32):
    """Cheapest path through a complete graph of straight edges.

    Nodes are ``x_init``, a ``resolution``-per-axis lattice, the corners of
    every obstacle and cost region, ``extra_points`` and points spread on
    the goal boundary. Every collision-free pair is an edge weighted by the
    exact cost model, so optimal paths that bend only at box corners are
    found exactly. Returns ``(cost, path)``; limited to 2D.
    """
    world = problem.world
    if world.dim != 2:
        raise OracleError("the complete-graph oracle is limited to 2D")
    if resolution < 2:
        raise OracleError("resolution must be at least 2")
    axis = np.linspace(0.0, 1.0, resolution)
    pts = [problem.x_init[None, :], np.stack(np.meshgrid(axis, axis, indexing="ij"), -1).reshape(-1, 2)]
    # obstacles are closed, so their corners are nudged outward
    boxes = [(b, 1e-9) for b in world.obstacles]
    boxes += [(b, 0.0) for b, _ in getattr(problem.cost.field, "regions", ())]
    for b, pad in boxes:
        pts.append(np.array([[x, y] for x in (b.lo[0] - pad, b.hi[0] + pad) for y in (b.lo[1] - pad, b.hi[1] + pad)]))
    if extra_points is not None:
        pts.append(np.atleast_2d(np.asarray(extra_points, dtype=float)))
    g = problem.goal
    if g.kind == "ball":
        ang = 2 * np.pi * np.arange(goal_points) / goal_points
        # the goal ball is open: stay a hair inside its boundary
        pts.append(g.center + g.xi * (1 - 1e-9) * np.stack([np.cos(ang), np.sin(ang)], 1))
        pts.append(g.center[None, :])
    P = np.vstack(pts)
    P = P[np.all((P >= 0) & (P <= 1), axis=1)]
    P = P[points_free(P, world)]
    N = P.shape[0]
    iu, ju = np.triu_indices(N, 1)
    w = problem.cost.segment_costs(P[iu], P[ju])
    ok = segments_collision_free(P[iu], P[ju], world)
    # zero-cost edges would vanish from the sparse matrix
    w = np.maximum(w, 1e-300)
    graph = coo_matrix((w[ok], (iu[ok], ju[ok])), shape=(N, N)).tocsr()
    dist, pred = dijkstra(graph, directed=False, indices=0, return_predecessors=True)
    goal_idx = np.flatnonzero(g.contains_many(P))
    if goal_idx.size == 0:
        return math.inf, None
    best = int(goal_idx[np.argmin(dist[goal_idx])])
    if not math.isfinite(dist[best]):
        return math.inf, None
    path = [best]
    while path[-1] != 0:
        path.append(int(pred[path[-1]]))
    return float(dist[best]), P[path[::-1]]
