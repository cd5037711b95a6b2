"""Adaptive shortcutting of piecewise-linear paths.

The path is first split into ``subdivide`` equal pieces per segment (more
vertices give the relaxation room to work). Each round then runs three
passes over the path:

1. Vertex pass. For every interior vertex try to drop it outright; if the
   direct segment collides, try bridging the midpoints of its two incident
   segments instead (this cuts the corner in half and adapts to narrow
   passages over repeated rounds).
2. Relaxation pass. Move every interior vertex a little downhill on the
   length of its two segments, sliding along single axes when the direct
   step is blocked. Cutting alone cannot slide a bend along an obstacle
   edge; this step can.
3. Random pass. Pick two random arc-length parameters and replace the
   portion between them by a straight segment.

A change is kept only when it is collision free and strictly cheaper, so
the cost never increases. Smoothing stops after ``stall_rounds`` rounds
whose relative improvement is at most ``1e-6``, after ``max_rounds``
rounds, or when the optional collision-check budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CostModel
from .geometry import CollisionChecker, World, path_collision_free
from .sampling import STREAM_SMOOTH, make_rng

STALL_TOL = 1e-6
# a move must beat the old cost by this relative margin (guards round-off)
_REL_GAIN = 1e-12


class SmoothingError(ValueError):
    pass


@dataclass(frozen=True)
class SmoothParams:
    max_rounds: int = 20
    stall_rounds: int = 2
    seed: int = 0
    random_tries: int | None = None
    max_checks: int | None = None
    subdivide: int = 2
    relax_steps: tuple = (0.5, 0.25, 0.125, 0.06)

    def __post_init__(self):
        if self.stall_rounds < 1 or self.max_rounds < self.stall_rounds:
            raise SmoothingError("need max_rounds >= stall_rounds >= 1")
        if self.subdivide < 1:
            raise SmoothingError("subdivide must be at least 1")
        if self.max_checks is not None and self.max_checks < 0:
            raise SmoothingError("max_checks must be nonnegative")
        if any(not 0 < s <= 1 for s in self.relax_steps):
            raise SmoothingError("relaxation steps must lie in (0, 1]")


class _Budget:
    """Collision checker with a check counter, an optional cap and a cache.

    Passes revisit the same segments round after round; a cached answer is
    not a new check.
    """

    def __init__(self, checker, limit):
        self.checker = checker
        self.limit = limit
        self.used = 0
        self._cache = {}

    @property
    def exhausted(self):
        return self.limit is not None and self.used >= self.limit

    def free(self, p, q) -> bool:
        key = (p.tobytes(), q.tobytes())
        key = min(key, key[::-1])
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.used += 1
        ok = self.checker.free(p, q)
        self._cache[key] = ok
        return ok


def _seg_cost(model, a, b) -> float:
    return float(model.segment_costs(a[None, :], b[None, :])[0])


def _vertex_pass(path, model, budget):
    pts = [p for p in path]
    i = 1
    while i < len(pts) - 1 and not budget.exhausted:
        a, v, b = pts[i - 1], pts[i], pts[i + 1]
        old = _seg_cost(model, a, v) + _seg_cost(model, v, b)
        if _seg_cost(model, a, b) < old * (1 - _REL_GAIN) and budget.free(a, b):
            del pts[i]
            continue
        m1 = 0.5 * (a + v)
        m2 = 0.5 * (v + b)
        half = _seg_cost(model, m1, v) + _seg_cost(model, v, m2)
        if not budget.exhausted and _seg_cost(model, m1, m2) < half * (1 - _REL_GAIN) and budget.free(m1, m2):
            pts[i : i + 1] = [m1, m2]
            i += 2
            continue
        i += 1
    return np.array(pts)


def _relax_pass(path, model, budget, steps):
    """Move each interior vertex downhill on the length of its two segments.

    The full descent step is tried first; if it is blocked, the step is
    projected onto single axes (largest component first) so the vertex can
    slide along an axis-aligned obstacle face. Step sizes are fractions of
    the shorter incident segment.
    """
    path = path.copy()
    d = path.shape[1]
    for i in range(1, path.shape[0] - 1):
        if budget.exhausted:
            break
        a, v, b = path[i - 1], path[i], path[i + 1]
        la, lb = np.linalg.norm(v - a), np.linalg.norm(v - b)
        if la == 0.0 or lb == 0.0:
            continue
        g = (v - a) / la + (v - b) / lb
        gn = np.linalg.norm(g)
        if gn < 1e-12:
            continue
        old = _seg_cost(model, a, v) + _seg_cost(model, v, b)
        moved = False
        for s in steps:
            step = -g / gn * (s * min(la, lb))
            cands = [v + step]
            for j in np.argsort(-np.abs(step)):
                axis_step = np.zeros(d)
                axis_step[j] = step[j]
                cands.append(v + axis_step)
            for c in cands:
                if _seg_cost(model, a, c) + _seg_cost(model, c, b) >= old * (1 - _REL_GAIN):
                    continue
                if budget.free(a, c) and budget.free(c, b):
                    path[i] = c
                    moved = True
                    break
                if budget.exhausted:
                    break
            if moved or budget.exhausted:
                break
    return path


def _subdivide(path, parts):
    if parts <= 1:
        return path
    t = np.arange(parts) / parts
    pieces = path[:-1, None, :] + t[None, :, None] * (path[1:] - path[:-1])[:, None, :]
    return np.vstack([pieces.reshape(-1, path.shape[1]), path[-1:]])


def _point_at(path, cum, s):
    j = int(np.searchsorted(cum, s, side="right")) - 1
    j = min(max(j, 0), path.shape[0] - 2)
    seg = cum[j + 1] - cum[j]
    t = 0.0 if seg == 0 else (s - cum[j]) / seg
    return j, path[j] + t * (path[j + 1] - path[j])


def _random_pass(path, model, budget, rng, tries):
    for _ in range(tries):
        if budget.exhausted or path.shape[0] < 3:
            break
        lengths = np.linalg.norm(np.diff(path, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        s1, s2 = np.sort(rng.random(2) * cum[-1])
        i, a = _point_at(path, cum, s1)
        j, b = _point_at(path, cum, s2)
        if j <= i:
            continue
        portion = np.vstack([a, path[i + 1 : j + 1], b])
        old = float(model.segment_costs(portion[:-1], portion[1:]).sum())
        if _seg_cost(model, a, b) < old * (1 - _REL_GAIN) and budget.free(a, b):
            path = np.vstack([path[: i + 1], a, b, path[j + 1 :]])
            # drop zero-length pieces created at the cut points
            keep = np.ones(path.shape[0], dtype=bool)
            keep[1:] = np.any(np.diff(path, axis=0) != 0.0, axis=1)
            keep[-1] = True
            path = path[keep]
    return path


def adaptive_shortcut(
    path,
    world: World,
    model: CostModel | None = None,
    params: SmoothParams | None = None,
    wrap=None,
    stats=None,
) -> np.ndarray:
    """Shortcut ``path``; returns a collision-free path no costlier than the input.

    Collision checks are added to ``stats.smoothing_collision_checks`` when
    a :class:`Stats` object is passed.
    """
    model = model or CostModel.euclidean()
    params = params or SmoothParams()
    path = np.array(path, dtype=float, copy=True)
    if path.ndim != 2 or path.shape[0] < 1:
        raise SmoothingError("path must be a nonempty (m, d) array")
    if not path_collision_free(path, world, wrap):
        raise SmoothingError("input path is in collision")
    if path.shape[0] <= 2:
        return path
    original = path.copy()
    if wrap is not None and np.any(wrap):
        raise SmoothingError("shortcutting on wrapped axes is not supported")
    checker = CollisionChecker(world, wrap)
    budget = _Budget(checker, params.max_checks)
    rng = make_rng(params.seed, STREAM_SMOOTH)

    def total(p):
        return float(model.segment_costs(p[:-1], p[1:]).sum())

    start_cost = total(path)
    path = _subdivide(path, params.subdivide)
    cost = total(path)
    stall = 0
    for _ in range(params.max_rounds):
        before = cost
        cand = _vertex_pass(path, model, budget)
        cand = _relax_pass(cand, model, budget, params.relax_steps)
        tries = params.random_tries if params.random_tries is not None else cand.shape[0]
        cand = _random_pass(cand, model, budget, rng, tries)
        new = total(cand)
        if new <= cost:
            path, cost = cand, new
        gain = (before - cost) / before if before > 0 else 0.0
        stall = stall + 1 if gain <= STALL_TOL else 0
        if stall >= params.stall_rounds or budget.exhausted:
            break
    if stats is not None:
        stats.smoothing_collision_checks += budget.used
    if cost > start_cost:
        # subdivision round-off without any accepted change
        return np.array(original, copy=True)
    return path
