"""Shared planner configuration, counters and results."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from ..costs import metric_ball_volume
from ..geometry import unit_ball_volume
from ..problem import ProblemDef
from ..sampling import SampleSet, sample_density, with_goal_samples


class PlannerError(ValueError):
    pass


class SubBoundWarning(UserWarning):
    """A radius or k below the value that guarantees asymptotic optimality."""


def default_eta(d: int) -> float:
    # (1 + eta)^d = e makes the expected radial neighbor count 2^d e / d log n,
    # the same as the k-nearest default
    return math.exp(1.0 / d) - 1.0


def default_k0(d: int) -> float:
    return 2.0**d * math.e / d


def k0_bound(d: int) -> float:
    """Smallest k0 for which k-nearest FMT* is asymptotically optimal."""
    return 3.0**d * math.e * (1.0 + 1.0 / d)


def default_k0_rrt(d: int) -> float:
    return math.e + math.e / d


@dataclass
class PlannerConfig:
    variant: str = "radial"
    eta: float | None = None
    rm: float = 1.0
    k0: float | None = None
    goal_samples: int = 1
    radius_override: float | None = None
    steer_fraction: float = 0.2
    goal_bias: float = 0.05
    k0_rrt: float | None = None
    cache_collisions: bool = True
    trace: bool = False
    keep_tree: bool = False

    def __post_init__(self):
        if self.variant not in ("radial", "knn"):
            raise PlannerError(f"unknown variant {self.variant!r}")
        if self.eta is not None and self.eta <= -1:
            raise PlannerError("eta must exceed -1")
        if self.rm <= 0:
            raise PlannerError("radius multiplier must be positive")
        if self.k0 is not None and self.k0 <= 0:
            raise PlannerError("k0 must be positive")
        if self.goal_samples < 0:
            raise PlannerError("goal sample count must be nonnegative")
        if self.radius_override is not None and self.radius_override <= 0:
            raise PlannerError("radius override must be positive")
        if not 0.0 < self.steer_fraction <= 1.0:
            raise PlannerError("steer fraction must lie in (0, 1]")
        if not 0.0 <= self.goal_bias < 1.0:
            raise PlannerError("goal bias must lie in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Stats:
    iterations: int = 0
    collision_checks: int = 0
    cost_evaluations: int = 0
    near_computations: int = 0
    wall_time: float = 0.0
    smoothing_collision_checks: int = 0
    n_samples: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PlanResult:
    success: bool
    path: np.ndarray
    cost: float
    stats: Stats
    radius: float | None = None
    k: int | None = None
    goal_index: int | None = None
    parent: np.ndarray | None = None
    cost_to_arrive: np.ndarray | None = None
    trace: dict | None = None
    algorithm: str = ""

    def to_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "success": self.success,
            "cost": self.cost if self.success else None,
            "path": self.path.tolist(),
            "stats": self.stats.to_dict(),
        }
        if self.radius is not None:
            out["radius"] = self.radius
        if self.k is not None:
            out["k"] = self.k
        return out


def failure(stats: Stats, dim: int, **kw) -> PlanResult:
    return PlanResult(False, np.zeros((0, dim)), math.inf, stats, **kw)


def connection_radius(n: int, d: int, mu_free: float, eta: float, extra_multiplier: float = 1.0, zeta: float | None = None) -> float:
    """``mult (1 + eta) 2 (1/d)^(1/d) (mu/zeta)^(1/d) (log n / n)^(1/d)``."""
    if n < 2:
        raise PlannerError("the connection radius needs n >= 2")
    if d < 1:
        raise PlannerError("dimension must be positive")
    if not 0.0 < mu_free <= 1.0:
        raise PlannerError("mu_free must lie in (0, 1]")
    if eta <= -1:
        raise PlannerError("eta must exceed -1")
    zeta = unit_ball_volume(d) if zeta is None else zeta
    gamma = 2.0 * (1.0 / d) ** (1.0 / d) * (mu_free / zeta) ** (1.0 / d)
    return extra_multiplier * (1.0 + eta) * gamma * (math.log(n) / n) ** (1.0 / d)


def knn_count(n: int, d: int, k0: float) -> int:
    """``ceil(k0 log n)`` clamped to ``[1, n - 1]``."""
    if n < 2:
        raise PlannerError("k-nearest count needs n >= 2")
    k = math.ceil(k0 * math.log(n))
    return int(min(max(k, 1), n - 1))


def prepare_samples(problem: ProblemDef, samples: SampleSet | None, n: int | None, seed: int | None, config: PlannerConfig) -> SampleSet:
    """Draw samples when none are given and append goal samples."""
    if samples is None:
        if n is None:
            raise PlannerError("give either a sample set or a sample count")
        samples, _ = sample_density(n, problem.sampling, problem.world, 0 if seed is None else seed, problem.x_init)
    if not np.array_equal(samples.points[0], problem.x_init):
        raise PlannerError("sample set does not start at x_init")
    if samples.n_goal == 0 and config.goal_samples > 0:
        samples = with_goal_samples(samples, problem.goal, problem.world, config.goal_samples)
    return samples


def neighborhood(problem: ProblemDef, samples: SampleSet, config: PlannerConfig) -> tuple[float | None, int | None]:
    """Connection radius (radial) or neighbor count (k-nearest) for a run."""
    n = samples.n_eff
    d = problem.dim
    cost = problem.cost
    if config.variant == "knn":
        k0 = default_k0(d) if config.k0 is None else config.k0
        scale = (config.rm * samples.radius_multiplier * cost.radius_multiplier()) ** d
        if config.k0 is not None and k0 * scale <= k0_bound(d):
            warnings.warn(f"k0={k0 * scale:.4g} is below the optimality bound {k0_bound(d):.4g}", SubBoundWarning, stacklevel=3)
        return None, knn_count(n, d, k0 * scale)
    if config.radius_override is not None:
        return config.radius_override, None
    eta = default_eta(d) if config.eta is None else config.eta
    if (1.0 + eta) * config.rm <= 1.0:
        warnings.warn(f"effective (1 + eta) * RM = {(1 + eta) * config.rm:.4g} is below the optimality bound", SubBoundWarning, stacklevel=3)
    zeta = metric_ball_volume(cost, d) if cost.is_metric else unit_ball_volume(d)
    mult = config.rm * samples.radius_multiplier * cost.radius_multiplier()
    return connection_radius(n, d, problem.world.mu_free, eta, mult, zeta), None


def path_from_parents(parent: np.ndarray, points: np.ndarray, end: int) -> np.ndarray:
    chain = []
    v = end
    while v >= 0:
        chain.append(v)
        v = parent[v]
    return points[chain[::-1]]
