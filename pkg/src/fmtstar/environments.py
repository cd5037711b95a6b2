"""Benchmark worlds: recursive maze, bug trap, cost-field demos, random clutter.

Every generator is a pure function of its spec (and seed) and returns a
:class:`ProblemDef` whose ``provenance`` records both.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .costs import BoxRegionsField, ConstantField, CostModel, QuadratureRule, RadialField
from .geometry import Aabb, GoalRegion, World, clearance, point_free, segment_collision_free
from .problem import ProblemDef
from .sampling import STREAM_ENV, make_rng


class SpecError(ValueError):
    pass


# --------------------------------------------------------------------------
# recursive maze


@dataclass(frozen=True)
class MazeSpec:
    """Recursive maze.

    The 2D base is an S-shaped corridor: two walls of thickness ``t`` at
    heights 1/3 and 2/3, each leaving a gap of width ``h`` (the corridor
    fraction) at alternating ends. The start cell is ``[0, h]^2`` and the
    end cell ``[1 - h, 1]^2``. A maze in dimension ``j`` stacks two copies
    of the ``(j-1)``-maze along the last axis, separated by a divider of
    thickness ``t`` with a single hole above the lower copy's end cell. The
    upper copy is traversed backwards, so its end cell sits above the
    start cell.
    """

    dim: int = 2
    wall_thickness: float = 0.1
    corridor_fraction: float = 0.25
    goal_radius: float = 0.05

    def __post_init__(self):
        t, h = self.wall_thickness, self.corridor_fraction
        if self.dim < 2:
            raise SpecError("maze dimension must be >= 2")
        if not 0.0 < t <= 0.2:
            raise SpecError("wall thickness must lie in (0, 0.2]")
        if not 0.0 < h < 1.0:
            raise SpecError("corridor fraction must lie in (0, 1)")
        if h > 1.0 / 3.0 - t / 2.0:
            raise SpecError("walls too thick for this corridor width: no room for the start and end cells")
        if not 0.0 < self.goal_radius <= 0.2 * h:
            raise SpecError("goal radius must lie in (0, h/5]")


def _slabs(t: float) -> tuple[tuple[float, float], tuple[float, float]]:
    return (0.0, (1.0 - t) / 2.0), ((1.0 + t) / 2.0, 1.0)


def _maze_cells(spec: MazeSpec, dim: int) -> tuple[Aabb, Aabb]:
    """Start and end cells of the ``dim``-dimensional maze."""
    h, t = spec.corridor_fraction, spec.wall_thickness
    start = Aabb([0.0, 0.0], [h, h])
    end = Aabb([1.0 - h, 1.0 - h], [1.0, 1.0])
    lower, upper = _slabs(t)
    for _ in range(3, dim + 1):
        start, end = (
            Aabb(np.append(start.lo, lower[0]), np.append(start.hi, lower[1])),
            Aabb(np.append(start.lo, upper[0]), np.append(start.hi, upper[1])),
        )
    return start, end


def _complement_boxes(hole: Aabb) -> list[Aabb]:
    """Disjoint boxes covering ``[0, 1]^m`` minus the hole (zero-width pieces dropped)."""
    m = hole.dim
    out = []
    for i in range(m):
        lo = np.concatenate([hole.lo[:i], [0.0], np.zeros(m - i - 1)])
        hi = np.concatenate([hole.hi[:i], [hole.lo[i]], np.ones(m - i - 1)])
        if hole.lo[i] > 0.0:
            out.append(Aabb(lo, hi))
        lo = np.concatenate([hole.lo[:i], [hole.hi[i]], np.zeros(m - i - 1)])
        hi = np.concatenate([hole.hi[:i], [1.0], np.ones(m - i - 1)])
        if hole.hi[i] < 1.0:
            out.append(Aabb(lo, hi))
    return out


def maze_boxes(spec: MazeSpec, dim: int | None = None) -> list[Aabb]:
    dim = spec.dim if dim is None else dim
    t, h = spec.wall_thickness, spec.corridor_fraction
    if dim == 2:
        a, b = 1.0 / 3.0, 2.0 / 3.0
        return [
            Aabb([0.0, a - t / 2], [1.0 - h, a + t / 2]),
            Aabb([h, b - t / 2], [1.0, b + t / 2]),
        ]
    inner = maze_boxes(spec, dim - 1)
    lower, upper = _slabs(t)
    out = []
    for lo, hi in (lower, upper):
        out += [Aabb(np.append(o.lo, lo), np.append(o.hi, hi)) for o in inner]
    _, hole = _maze_cells(spec, dim - 1)
    out += [Aabb(np.append(o.lo, lower[1]), np.append(o.hi, upper[0])) for o in _complement_boxes(hole)]
    return out


# grid-Dijkstra cost (256 x 256, full-diagonal) of the default 2D maze from
# x_init to the goal ball; an upper estimate of its optimum
MAZE_L2_GRID256 = 1.93110


def maze_lower_bound(spec: MazeSpec, dim: int | None = None) -> float:
    """Length every path from the start cell to the end cell must exceed.

    In 2D this is the taut string from the start cell around both wall
    ends to the end cell. One dimension up, a path must cross the lower
    copy, the divider and the upper copy, and projecting each piece onto
    the first ``d - 1`` axes shows ``L_d >= 2 L_{d-1} + t``.
    """
    dim = spec.dim if dim is None else dim
    t, h = spec.wall_thickness, spec.corridor_fraction
    if dim == 2:
        run = 1.0 - 2.0 * h
        a, b = 1.0 / 3.0, 2.0 / 3.0
        first = math.hypot(run, max(0.0, a - t / 2 - h))
        middle = math.hypot(run, (b - t / 2) - (a + t / 2))
        last = math.hypot(run, max(0.0, (1.0 - h) - (b + t / 2)))
        return first + t + middle + t + last
    return 2.0 * maze_lower_bound(spec, dim - 1) + t


def maze_endpoints(spec: MazeSpec) -> tuple[np.ndarray, np.ndarray]:
    """``x_init`` and the goal-ball center."""
    h, t = spec.corridor_fraction, spec.wall_thickness
    lower, upper = _slabs(t)
    lo_mid = 0.5 * (lower[0] + lower[1])
    up_mid = 0.5 * (upper[0] + upper[1])
    inset = 0.8 * h
    if spec.dim == 2:
        return np.array([inset, inset]), np.array([1.0 - inset, 1.0 - inset])
    x0 = np.array([inset, inset] + [lo_mid] * (spec.dim - 2))
    goal = x0.copy()
    goal[-1] = up_mid
    return x0, goal


def recursive_maze(spec: MazeSpec | None = None) -> ProblemDef:
    spec = spec or MazeSpec()
    boxes = maze_boxes(spec)
    world = World(spec.dim, tuple(boxes))
    x0, gc = maze_endpoints(spec)
    return ProblemDef(
        world,
        x0,
        GoalRegion.ball(gc, spec.goal_radius),
        name=f"maze-{spec.dim}d",
        provenance={
            "generator": "recursive_maze",
            "spec": asdict(spec),
            "lower_bound": maze_lower_bound(spec),
        },
    )


# --------------------------------------------------------------------------
# bug trap


@dataclass(frozen=True)
class BugTrapSpec:
    """Square ring with a mouth corridor on its right side.

    The corridor is lined by two lips that fold ``lip_depth`` into the
    cavity, so a planner must find the narrow way out before it can head
    for the goal behind the trap.
    """

    center: tuple = (0.5, 0.5)
    outer_half: float = 0.3
    wall: float = 0.04
    mouth: float = 0.08
    lip_depth: float = 0.15
    start: tuple = (0.35, 0.5)
    goal: tuple = (0.1, 0.5)
    goal_radius: float = 0.05


def bug_trap_boxes(spec: BugTrapSpec) -> list[Aabb]:
    cx, cy = spec.center
    R, w, m, lip = spec.outer_half, spec.wall, spec.mouth, spec.lip_depth
    if m <= 0:
        raise SpecError("a bug trap needs a positive mouth width")
    if w <= 0 or R <= 0 or lip < w:
        raise SpecError("wall, size and lip depth must be positive (lip depth at least the wall)")
    if m / 2 + w > R - w:
        raise SpecError("mouth too wide for the trap")
    if lip > 2 * R - 2 * w:
        raise SpecError("lips longer than the cavity")
    if cx - R < 0 or cy - R < 0 or cx + R > 1 or cy + R > 1:
        raise SpecError("trap leaves the unit square")
    x0, x1, y0, y1 = cx - R, cx + R, cy - R, cy + R
    lo_m, hi_m = cy - m / 2, cy + m / 2
    return [
        Aabb([x0, y0], [x0 + w, y1]),  # left wall
        Aabb([x0 + w, y0], [x1, y0 + w]),  # bottom
        Aabb([x0 + w, y1 - w], [x1, y1]),  # top
        Aabb([x1 - w, y0 + w], [x1, lo_m - w]),  # right, below the mouth
        Aabb([x1 - w, hi_m + w], [x1, y1 - w]),  # right, above the mouth
        Aabb([x1 - lip, lo_m - w], [x1, lo_m]),  # lower lip
        Aabb([x1 - lip, hi_m], [x1, hi_m + w]),  # upper lip
    ]


def bug_trap_2d(spec: BugTrapSpec | None = None) -> ProblemDef:
    spec = spec or BugTrapSpec()
    boxes = bug_trap_boxes(spec)
    # the lips overlap the right wall pieces only on faces
    world = World(2, tuple(b for b in boxes if b.volume > 0))
    if not point_free(spec.start, world):
        raise SpecError("start lies in a wall")
    gc = np.asarray(spec.goal, dtype=float)
    if clearance(gc, world) < spec.goal_radius:
        raise SpecError("goal ball overlaps a wall or the square boundary")
    return ProblemDef(
        world,
        spec.start,
        GoalRegion.ball(gc, spec.goal_radius),
        name="bugtrap",
        provenance={"generator": "bug_trap_2d", "spec": asdict(spec)},
    )


# --------------------------------------------------------------------------
# cost-field demos

BLOCK = Aabb([0.4, 0.154], [0.6, 0.846])
DEMO_START = (0.2, 0.5)
DEMO_GOAL = (0.8, 0.5)
DEMO_XI = 0.05

COST_FIELD_KINDS = ("high-cost-block", "higher-cost-block", "radial", "constant")


def cost_field_demo(kind: str = "high-cost-block") -> ProblemDef:
    """Obstacle-free 2D problem with a spatially varying cost.

    The block variants put a cost-2 or cost-4 rectangle across the straight
    line from start to goal. With factor 2 crossing it is cheaper than
    walking around; with factor 4 the detour wins.
    """
    if kind == "high-cost-block":
        model = CostModel.line_integral(BoxRegionsField(1.0, [(BLOCK, 2.0)]), 1.0, 2.0)
    elif kind == "higher-cost-block":
        model = CostModel.line_integral(BoxRegionsField(1.0, [(BLOCK, 4.0)]), 1.0, 4.0)
    elif kind == "radial":
        field = RadialField([0.5, 0.5], 0.15, 1.0, 4.0)
        model = CostModel.line_integral(field, 1.0, 4.0, quadrature=QuadratureRule("fixed-gauss", points=12))
    elif kind == "constant":
        model = CostModel.line_integral(ConstantField(1.0), 1.0, 1.0)
    else:
        raise SpecError(f"unknown cost-field demo {kind!r}; choose from {COST_FIELD_KINDS}")
    return ProblemDef(
        World(2, ()),
        DEMO_START,
        GoalRegion.ball(DEMO_GOAL, DEMO_XI),
        cost=model,
        name=f"costfield-{kind}",
        provenance={"generator": "cost_field_demo", "kind": kind},
    )


def block_occupancy(path, block: Aabb = BLOCK) -> float:
    """Length of a polyline inside ``block``."""
    path = np.atleast_2d(np.asarray(path, dtype=float))
    if path.shape[0] < 2:
        return 0.0
    f = BoxRegionsField(0.0, [(block, 1.0)])
    return float(f.clipped_lengths(path[:-1], path[1:]).sum())


def crosses_block(path, block: Aabb = BLOCK) -> bool:
    """Whether a path goes "through" the block (spends over half its width inside)."""
    width = float(block.hi[0] - block.lo[0])
    return block_occupancy(path, block) > 0.5 * width


# --------------------------------------------------------------------------
# random clutter


@dataclass(frozen=True)
class ClutterSpec:
    dim: int = 2
    count: int = 50
    coverage: float = 0.3
    max_extent: float = 0.4
    disjoint: bool = True
    visible: bool | None = None
    goal_radius: float = 0.05
    min_separation: float = 0.3
    retries: int = 2000

    def __post_init__(self):
        if self.dim < 2 or self.count < 0:
            raise SpecError("clutter needs dim >= 2 and a nonnegative count")
        if not 0.0 <= self.coverage < 0.9:
            raise SpecError("coverage must lie in [0, 0.9)")
        if self.coverage > 0 and self.count == 0:
            raise SpecError("positive coverage needs at least one box")
        if not 0.0 < self.max_extent <= 1.0:
            raise SpecError("max extent must lie in (0, 1]")


def _clutter_boxes(spec: ClutterSpec, rng) -> list[Aabb]:
    if spec.coverage == 0 or spec.count == 0:
        return []
    d = spec.dim
    vol = spec.coverage / spec.count
    boxes: list[Aabb] = []
    for _ in range(spec.count):
        for _attempt in range(spec.retries):
            aspect = np.exp(rng.uniform(-0.4, 0.4, d))
            side = aspect * (vol / np.prod(aspect)) ** (1.0 / d)
            if np.any(side > spec.max_extent):
                continue
            lo = rng.random(d) * (1.0 - side)
            box = Aabb(lo, lo + side)
            if not spec.disjoint or all(box.overlap_volume(b) == 0.0 for b in boxes):
                boxes.append(box)
                break
        else:
            raise SpecError(f"could not place box {len(boxes) + 1} of {spec.count} after {spec.retries} tries")
    return boxes


def random_clutter(spec: ClutterSpec | None = None, seed: int = 0) -> ProblemDef:
    spec = spec or ClutterSpec()
    rng = make_rng(seed, STREAM_ENV)
    world = World(spec.dim, tuple(_clutter_boxes(spec, rng)))
    for _ in range(spec.retries):
        x0 = rng.random(spec.dim)
        gc = rng.random(spec.dim)
        if not point_free(x0, world) or clearance(gc, world) <= spec.goal_radius:
            continue
        if np.linalg.norm(gc - x0) < max(spec.min_separation, spec.goal_radius):
            continue
        if spec.visible is not None and segment_collision_free(x0, gc, world) != spec.visible:
            continue
        return ProblemDef(
            world,
            x0,
            GoalRegion.ball(gc, spec.goal_radius),
            name=f"clutter-{spec.dim}d-{seed}",
            provenance={"generator": "random_clutter", "spec": asdict(spec), "seed": seed},
        )
    raise SpecError("could not place start and goal after bounded retries")
