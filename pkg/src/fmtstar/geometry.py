"""Configuration-space geometry for point robots in the unit cube.

Obstacles are closed axis-aligned boxes. Everything here is pure: a
:class:`World` is immutable once built (apart from the cached free-space
measure) and the predicates only read from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SLAB_TOL = 1e-12

# segments per vectorized chunk in the batch collision checker
_BATCH_CELLS = 400_000


class GeometryError(ValueError):
    """Malformed geometric input (dimension mismatch, inverted box, ...)."""


class MeasureError(ValueError):
    """Requested free-space measure method is not valid for this world."""


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the Euclidean unit ball in ``d`` dimensions."""
    if d < 1:
        raise GeometryError(f"dimension must be >= 1, got {d}")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if dim is not None and p.shape[0] != dim:
        raise GeometryError(f"expected a {dim}-dimensional point, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise GeometryError("point coordinates must be finite")
    return p


@dataclass(frozen=True, eq=False)
class Aabb:
    """Closed axis-aligned box ``[lo, hi]``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_point(self.lo)
        hi = as_point(self.hi, lo.shape[0])
        if np.any(lo > hi):
            raise GeometryError(f"box has min > max: {lo} vs {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def overlap_volume(self, other: "Aabb") -> float:
        ext = np.minimum(self.hi, other.hi) - np.maximum(self.lo, other.lo)
        return float(np.prod(np.clip(ext, 0.0, None)))

    def __eq__(self, other):
        if not isinstance(other, Aabb):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self):
        return f"Aabb(lo={self.lo.tolist()}, hi={self.hi.tolist()})"

    def to_dict(self) -> dict:
        return {"min": self.lo.tolist(), "max": self.hi.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Aabb":
        return cls(data["min"], data["max"])


@dataclass(frozen=True, eq=False)
class World:
    """Unit cube ``[0, 1]^dim`` minus a union of closed boxes.

    ``mu_free`` is computed on construction when not given: exactly for
    pairwise-disjoint obstacles, otherwise on a grid (or by Monte Carlo
    in high dimension).
    """

    dim: int
    obstacles: tuple = ()
    mu_free: float | None = None
    lo: np.ndarray = field(init=False, repr=False)
    hi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.dim) < 2:
            raise GeometryError(f"world dimension must be >= 2, got {self.dim}")
        obstacles = tuple(o if isinstance(o, Aabb) else Aabb(*o) for o in self.obstacles)
        for o in obstacles:
            if o.dim != self.dim:
                raise GeometryError(f"obstacle dimension {o.dim} != world dimension {self.dim}")
            if np.any(o.lo < -SLAB_TOL) or np.any(o.hi > 1.0 + SLAB_TOL):
                raise GeometryError(f"obstacle {o} leaves the unit cube")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "obstacles", obstacles)
        if obstacles:
            lo = np.stack([o.lo for o in obstacles])
            hi = np.stack([o.hi for o in obstacles])
        else:
            lo = np.zeros((0, self.dim))
            hi = np.zeros((0, self.dim))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.mu_free is None:
            if obstacles_disjoint(obstacles):
                free_space_measure(self, "exact")
            elif self.dim <= 4:
                free_space_measure(self, "grid", resolution=_default_grid_resolution(self.dim))
            else:
                free_space_measure(self, "monte-carlo", samples=400_000, seed=0)
        if not 0.0 < self.mu_free <= 1.0:
            raise GeometryError(f"free space measure must lie in (0, 1], got {self.mu_free}")

    @property
    def n_obstacles(self) -> int:
        return len(self.obstacles)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "obstacles": [o.to_dict() for o in self.obstacles]}

    @classmethod
    def from_dict(cls, data: dict) -> "World":
        return cls(int(data["dim"]), tuple(Aabb.from_dict(o) for o in data.get("obstacles", [])))


def _default_grid_resolution(d: int) -> int:
    return max(16, int(round(2 ** (22 / d))))


def obstacles_disjoint(obstacles: Sequence[Aabb]) -> bool:
    """True when no two boxes share interior volume (touching faces is fine)."""
    if len(obstacles) < 2:
        return True
    lo = np.stack([o.lo for o in obstacles])
    hi = np.stack([o.hi for o in obstacles])
    ext = np.minimum(hi[:, None, :], hi[None, :, :]) - np.maximum(lo[:, None, :], lo[None, :, :])
    overlap = np.all(ext > SLAB_TOL, axis=2)
    np.fill_diagonal(overlap, False)
    return not bool(overlap.any())


# --------------------------------------------------------------------------
# point predicates


def points_in_obstacles(points, world: World) -> np.ndarray:
    """Boolean mask of points lying in (closed) obstacles."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != world.dim:
        raise GeometryError(f"points have dimension {pts.shape[1]}, world has {world.dim}")
    if world.n_obstacles == 0:
        return np.zeros(pts.shape[0], dtype=bool)
    out = np.zeros(pts.shape[0], dtype=bool)
    for lo, hi in zip(world.lo, world.hi):
        out |= np.all((pts >= lo) & (pts <= hi), axis=1)
    return out


def points_free(points, world: World) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    inside_cube = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
    return inside_cube & ~points_in_obstacles(pts, world)


def point_free(x, world: World) -> bool:
    return bool(points_free(as_point(x, world.dim)[None, :], world)[0])


# --------------------------------------------------------------------------
# segment predicates


def _slab_hits(p, dirv, lo, hi):
    """Closed slab-clipping test; broadcasting over leading axes.

    ``p``/``dirv`` broadcast against ``lo``/``hi``; the last axis is the
    coordinate axis. Returns a boolean array (last axis reduced).
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirv
        t1 = (lo - p) * inv
        t2 = (hi - p) * inv
    tnear = np.minimum(t1, t2)
    tfar = np.maximum(t1, t2)
    flat = dirv == 0.0
    if np.any(flat):
        inside = (p >= lo) & (p <= hi)
        tnear = np.where(flat, np.where(inside, -np.inf, np.inf), tnear)
        tfar = np.where(flat, np.where(inside, np.inf, -np.inf), tfar)
    enter = np.maximum(tnear.max(axis=-1), 0.0)
    leave = np.minimum(tfar.min(axis=-1), 1.0)
    return enter <= leave + SLAB_TOL


def _wrap_images(world: World, wrap) -> tuple[np.ndarray, np.ndarray]:
    """Obstacle arrays replicated by +-1 along wrapped axes."""
    lo, hi = world.lo, world.hi
    if wrap is None or not np.any(wrap):
        return lo, hi
    axes = np.flatnonzero(np.asarray(wrap, dtype=bool))
    shifts = np.array(np.meshgrid(*[[-1.0, 0.0, 1.0]] * len(axes), indexing="ij")).reshape(len(axes), -1).T
    los, his = [], []
    for s in shifts:
        off = np.zeros(world.dim)
        off[axes] = s
        los.append(lo + off)
        his.append(hi + off)
    return np.concatenate(los), np.concatenate(his)


def wrapped_delta(p, q, wrap) -> np.ndarray:
    """Displacement ``q - p`` taking the shorter arc on wrapped axes."""
    delta = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    if wrap is None:
        return delta
    w = np.asarray(wrap, dtype=bool)
    if not w.any():
        return delta
    delta = delta.copy()
    dw = delta[..., w]
    dw = dw - np.round(dw)
    delta[..., w] = dw
    return delta


def segment_collision_free(p, q, world: World, wrap=None) -> bool:
    """True iff the closed segment ``pq`` misses every (closed) obstacle.

    With ``wrap`` (a per-axis boolean mask) the segment follows the shorter
    arc on wrapped axes.
    """
    p = as_point(p, world.dim)
    q = as_point(q, world.dim)
    if world.n_obstacles == 0:
        return True
    lo, hi = _wrap_images(world, wrap)
    dirv = wrapped_delta(p, q, wrap)
    return not bool(_slab_hits(p, dirv, lo, hi).any())


def segments_collision_free(P, Q, world: World, wrap=None) -> np.ndarray:
    """Vectorized :func:`segment_collision_free` over rows of ``P`` and ``Q``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if P.shape != Q.shape or P.shape[1] != world.dim:
        raise GeometryError("segment endpoint arrays must both be (m, dim)")
    m = P.shape[0]
    out = np.ones(m, dtype=bool)
    if world.n_obstacles == 0 or m == 0:
        return out
    lo, hi = _wrap_images(world, wrap)
    D = wrapped_delta(P, Q, wrap)
    chunk = max(1, _BATCH_CELLS // (lo.shape[0] * world.dim))
    for s in range(0, m, chunk):
        e = min(m, s + chunk)
        hits = _slab_hits(P[s:e, None, :], D[s:e, None, :], lo[None], hi[None])
        out[s:e] = ~hits.any(axis=1)
    return out


def path_collision_free(path, world: World, wrap=None) -> bool:
    path = np.atleast_2d(np.asarray(path, dtype=float))
    if path.shape[0] == 1:
        return point_free(path[0], world)
    return bool(segments_collision_free(path[:-1], path[1:], world, wrap).all())


class CollisionChecker:
    """Segment checks against one world with the obstacle arrays prepared once."""

    def __init__(self, world: World, wrap=None):
        self.world = world
        self.wrap = None if wrap is None or not np.any(wrap) else np.asarray(wrap, dtype=bool)
        self.lo, self.hi = _wrap_images(world, self.wrap)
        self.empty = world.n_obstacles == 0

    def free(self, p, q) -> bool:
        if self.empty:
            return True
        dirv = q - p if self.wrap is None else wrapped_delta(p, q, self.wrap)
        return not bool(_slab_hits(p, dirv, self.lo, self.hi).any())

    def free_many(self, P, Q) -> np.ndarray:
        return segments_collision_free(P, Q, self.world, self.wrap)


# --------------------------------------------------------------------------
# clearance and measure


def clearance(x, world: World, boundary: bool = True) -> float:
    """Distance from ``x`` to the nearest obstacle point (0 inside one).

    With ``boundary`` the faces of the unit cube count as obstacle.
    """
    x = as_point(x, world.dim)
    best = np.inf
    if world.n_obstacles:
        gap = np.maximum(np.maximum(world.lo - x, 0.0), x - world.hi)
        best = float(np.sqrt((gap * gap).sum(axis=1)).min())
    if boundary:
        best = min(best, float(np.min(np.minimum(x, 1.0 - x))))
        best = max(best, 0.0)
    return best


def free_space_measure(
    world: World,
    method: str = "exact",
    *,
    resolution: int | Sequence[int] | None = None,
    samples: int = 200_000,
    seed: int = 0,
) -> float:
    """Measure of the free space; the result is cached on ``world``.

    ``method`` is one of ``"exact"`` (alias ``"exact-disjoint"``; requires
    pairwise-disjoint obstacles), ``"grid"`` (cell-centre rasterization at
    ``resolution`` cells per axis) or ``"monte-carlo"``.
    """
    if method in ("exact", "exact-disjoint"):
        if not obstacles_disjoint(world.obstacles):
            raise MeasureError("exact measure requires pairwise-disjoint obstacles")
        mu = 1.0 - sum(o.volume for o in world.obstacles)
    elif method == "grid":
        res = resolution if resolution is not None else _default_grid_resolution(world.dim)
        mu = 1.0 - _grid_occupancy(world, res).mean()
    elif method in ("monte-carlo", "mc"):
        rng = np.random.Generator(np.random.Philox(seed))
        hits = 0
        done = 0
        while done < samples:
            m = min(100_000, samples - done)
            hits += int(points_in_obstacles(rng.random((m, world.dim)), world).sum())
            done += m
        mu = 1.0 - hits / samples
    else:
        raise MeasureError(f"unknown measure method {method!r}")
    mu = float(mu)
    object.__setattr__(world, "mu_free", mu)
    return mu


def _grid_occupancy(world: World, resolution) -> np.ndarray:
    """Boolean occupancy of cell centres on a regular grid."""
    res = np.broadcast_to(np.asarray(resolution, dtype=int), (world.dim,))
    if np.prod(res.astype(float)) > 5e8:
        raise MeasureError(f"grid with {res.tolist()} cells is too large")
    occ = np.zeros(tuple(res), dtype=bool)
    for o in world.obstacles:
        # cell i has centre (i + 0.5) / res; closed box test on centres
        first = np.ceil(o.lo * res - 0.5).astype(int)
        last = np.floor(o.hi * res - 0.5).astype(int)
        first = np.clip(first, 0, res)
        last = np.clip(last + 1, 0, res)
        if np.any(last <= first):
            continue
        occ[tuple(slice(a, b) for a, b in zip(first, last))] = True
    return occ


def monte_carlo_standard_error(mu: float, samples: int) -> float:
    return math.sqrt(max(mu * (1.0 - mu), 0.0) / samples)


def inflate_obstacles(world: World, half_extents) -> World:
    """Grow every obstacle by ``half_extents`` per axis (clipped to the cube).

    This is the Minkowski sum with a box-shaped robot, which reduces
    planning for that robot to planning for a point.
    """
    h = as_point(half_extents, world.dim)
    if np.any(h < 0):
        raise GeometryError("half extents must be nonnegative")
    if not np.any(h > 0):
        return World(world.dim, world.obstacles, world.mu_free)
    grown = tuple(
        Aabb(np.clip(o.lo - h, 0.0, 1.0), np.clip(o.hi + h, 0.0, 1.0)) for o in world.obstacles
    )
    return World(world.dim, grown)


# --------------------------------------------------------------------------
# goal regions


@dataclass(frozen=True, eq=False)
class GoalRegion:
    """Open goal set: a ball of radius ``xi`` or an open box."""

    kind: str
    center: np.ndarray | None = None
    xi: float | None = None
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "ball":
            if self.center is None or self.xi is None or self.xi <= 0:
                raise GeometryError("ball goal needs a center and a positive radius xi")
            object.__setattr__(self, "center", as_point(self.center))
            object.__setattr__(self, "xi", float(self.xi))
        elif self.kind == "box":
            box = Aabb(self.lo, self.hi)
            object.__setattr__(self, "lo", box.lo)
            object.__setattr__(self, "hi", box.hi)
        else:
            raise GeometryError(f"unknown goal kind {self.kind!r}")

    @classmethod
    def ball(cls, center, xi: float) -> "GoalRegion":
        return cls("ball", center=center, xi=xi)

    @classmethod
    def box(cls, lo, hi) -> "GoalRegion":
        return cls("box", lo=lo, hi=hi)

    @property
    def dim(self) -> int:
        return (self.center if self.kind == "ball" else self.lo).shape[0]

    def contains_many(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "ball":
            diff = pts - self.center
            return np.einsum("ij,ij->i", diff, diff) < self.xi * self.xi
        return np.all((pts > self.lo) & (pts < self.hi), axis=1)

    def contains(self, x) -> bool:
        return bool(self.contains_many(np.asarray(x, dtype=float)[None, :])[0])

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "ball":
            lo, hi = self.center - self.xi, self.center + self.xi
        else:
            lo, hi = self.lo, self.hi
        return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

    def distance(self, x) -> float:
        """Euclidean distance from ``x`` to the closure of the region."""
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            return max(0.0, float(np.linalg.norm(x - self.center)) - self.xi)
        gap = np.maximum(np.maximum(self.lo - x, 0.0), x - self.hi)
        return float(np.linalg.norm(gap))

    def to_dict(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball", "center": self.center.tolist(), "xi": self.xi}
        return {"kind": "box", "min": self.lo.tolist(), "max": self.hi.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GoalRegion":
        if data["kind"] == "ball":
            return cls.ball(data["center"], data["xi"])
        if data["kind"] == "box":
            return cls.box(data["min"], data["max"])
        raise GeometryError(f"unknown goal kind {data['kind']!r}")
