"""Sample sets drawn from the free space.

All randomness flows through :func:`make_rng`, a Philox counter-based
generator keyed by ``(seed, stream)``. Different streams of one seed are
independent, so sampling, goal sampling, RRT* and smoothing never share
random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Aabb, GoalRegion, World, as_point, points_free

# stream ids for make_rng
STREAM_SAMPLES = 0
STREAM_GOAL = 1
STREAM_RRT = 2
STREAM_SMOOTH = 3
STREAM_ENV = 4

MIN_ACCEPTANCE = 1e-4
ACCEPTANCE_WINDOW = 200_000


class SamplingError(RuntimeError):
    pass


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator for ``(seed, stream)``; reproducible bit for bit."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Indexed points; row 0 is ``x_init``.

    ``n`` counts the free-space samples. Goal samples appended by a planner
    sit after them and are flagged in ``goal_flags``.
    """

    points: np.ndarray
    n: int
    seed: int | None = None
    goal_flags: np.ndarray | None = None
    radius_multiplier: float = 1.0

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        flags = np.zeros(pts.shape[0], dtype=bool) if self.goal_flags is None else np.asarray(self.goal_flags, bool)
        if flags.shape[0] != pts.shape[0]:
            raise SamplingError("goal flag count differs from point count")
        object.__setattr__(self, "goal_flags", flags)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_goal(self) -> int:
        return int(self.goal_flags.sum())

    @property
    def n_eff(self) -> int:
        """Samples other than ``x_init``, goal samples included."""
        return self.points.shape[0] - 1


def _rejection(rng, n, lo, hi, accept, what: str) -> np.ndarray:
    """Draw ``n`` points uniform on ``[lo, hi]`` restricted to ``accept``."""
    d = lo.shape[0]
    out = np.empty((n, d))
    got = 0
    drawn = 0
    accepted = 0
    rate = 0.5
    while got < n:
        batch = int(min(1_000_000, max(256, (n - got) / max(rate, 1e-3) * 1.1)))
        cand = lo + rng.random((batch, d)) * (hi - lo)
        ok = accept(cand)
        k = int(ok.sum())
        drawn += batch
        accepted += k
        rate = max(accepted / drawn, 1e-6)
        take = cand[ok][: n - got]
        out[got : got + take.shape[0]] = take
        got += take.shape[0]
        if drawn >= ACCEPTANCE_WINDOW and accepted / drawn < MIN_ACCEPTANCE and got < n:
            raise SamplingError(f"{what}: acceptance rate {accepted / drawn:.2e} below {MIN_ACCEPTANCE:g}")
    return out


def sample_free(n: int, world: World, seed: int, x_init) -> SampleSet:
    """``n`` i.i.d. uniform samples on the free space, after ``x_init``."""
    n = int(n)
    if n < 0:
        raise SamplingError("sample count must be nonnegative")
    x0 = as_point(x_init, world.dim)
    if n == 0:
        return SampleSet(x0[None, :], 0, seed)
    rng = make_rng(seed, STREAM_SAMPLES)
    zeros, ones = np.zeros(world.dim), np.ones(world.dim)
    pts = _rejection(rng, n, zeros, ones, lambda c: points_free(c, world), "free-space sampling")
    return SampleSet(np.vstack([x0, pts]), n, seed)


def sample_goal(g: int, goal: GoalRegion, world: World, seed: int) -> np.ndarray:
    """``g`` uniform samples on ``goal`` intersected with the free space."""
    if g <= 0:
        return np.zeros((0, world.dim))
    rng = make_rng(seed, STREAM_GOAL)
    lo, hi = goal.bounds()

    def accept(c):
        return goal.contains_many(c) & points_free(c, world)

    return _rejection(rng, g, lo, hi, accept, "goal sampling")


def with_goal_samples(samples: SampleSet, goal: GoalRegion, world: World, g: int) -> SampleSet:
    """Append ``g`` flagged goal samples, seeded from the sample set's seed."""
    if g <= 0:
        return samples
    seed = 0 if samples.seed is None else samples.seed
    extra = sample_goal(g, goal, world, seed)
    flags = np.concatenate([samples.goal_flags, np.ones(g, dtype=bool)])
    return SampleSet(np.vstack([samples.points, extra]), samples.n, samples.seed, flags, samples.radius_multiplier)


# --------------------------------------------------------------------------
# non-uniform densities


@dataclass(frozen=True, eq=False)
class DensitySpec:
    """Mixture density on the free space.

    ``phi = w0 * U(X_free) + sum_i w_i * U(B_i cap X_free)`` where ``U(S)``
    is the uniform density on ``S``. Densities are measured relative to the
    uniform density on the free space, so ``ell`` and ``envelope`` bound
    ``phi / U(X_free)`` from below and above.
    """

    kind: str = "uniform"
    ell: float = 1.0
    uniform_weight: float = 1.0
    components: tuple = ()
    envelope: float | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "mixture"):
            raise SamplingError(f"unknown density kind {self.kind!r}")
        if not 0.0 < self.ell <= 1.0:
            raise SamplingError("ell must lie in (0, 1]")
        comps = tuple((Aabb(*c[0]) if not isinstance(c[0], Aabb) else c[0], float(c[1])) for c in self.components)
        object.__setattr__(self, "components", comps)
        if self.kind == "uniform":
            if self.ell != 1.0 or comps:
                raise SamplingError("a uniform density has ell = 1 and no components")
            return
        weights = [w for _, w in comps]
        if any(w < 0 for w in weights) or self.uniform_weight < 0:
            raise SamplingError("mixture weights must be nonnegative")
        if abs(self.uniform_weight + sum(weights) - 1.0) > 1e-9:
            raise SamplingError("mixture weights must sum to 1")
        if self.ell > self.uniform_weight + 1e-12:
            raise SamplingError(
                f"declared ell={self.ell} exceeds the density's lower bound {self.uniform_weight}"
            )

    @classmethod
    def uniform(cls) -> "DensitySpec":
        return cls()

    @classmethod
    def mixture(cls, uniform_weight: float, components, ell: float | None = None, envelope=None):
        return cls(
            "mixture",
            ell=uniform_weight if ell is None else ell,
            uniform_weight=uniform_weight,
            components=tuple(components),
            envelope=envelope,
        )

    def radius_multiplier(self, d: int) -> float:
        return (1.0 / self.ell) ** (1.0 / d)

    def _component_measures(self, world: World) -> np.ndarray:
        out = []
        for box, _ in self.components:
            if box.dim != world.dim:
                raise SamplingError("density component dimension mismatch")
            m = box.volume - sum(box.overlap_volume(o) for o in world.obstacles)
            if m <= 0:
                raise SamplingError(f"density component {box} has no free volume")
            out.append(m)
        return np.array(out)

    def relative_density(self, points, world: World) -> np.ndarray:
        """``phi / U(X_free)`` at free points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        val = np.full(pts.shape[0], 1.0 if self.kind == "uniform" else self.uniform_weight)
        if self.kind == "mixture":
            mu = world.mu_free
            for (box, w), m in zip(self.components, self._component_measures(world)):
                inside = np.all((pts >= box.lo) & (pts <= box.hi), axis=1)
                val[inside] += w * mu / m
        return val

    def envelope_bound(self, world: World) -> float:
        if self.kind == "uniform":
            return 1.0
        mu = world.mu_free
        peak = self.uniform_weight + sum(w * mu / m for (_, w), m in zip(self.components, self._component_measures(world)))
        return peak if self.envelope is None else float(self.envelope)

    def mass_check(self, world: World, samples: int = 200_000, seed: int = 0) -> float:
        """Monte Carlo estimate of the integral of ``phi`` (should be 1)."""
        rng = make_rng(seed, STREAM_SAMPLES)
        pts = _rejection(rng, samples, np.zeros(world.dim), np.ones(world.dim), lambda c: points_free(c, world), "mass check")
        return float(self.relative_density(pts, world).mean())

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        out = {
            "kind": "mixture",
            "ell": self.ell,
            "uniform_weight": self.uniform_weight,
            "components": [{"min": b.lo.tolist(), "max": b.hi.tolist(), "weight": w} for b, w in self.components],
        }
        if self.envelope is not None:
            out["envelope"] = self.envelope
        return out

    @classmethod
    def from_dict(cls, data: dict | None) -> "DensitySpec":
        if not data or data.get("kind", "uniform") == "uniform":
            return cls.uniform()
        comps = [(Aabb(c["min"], c["max"]), c["weight"]) for c in data.get("components", [])]
        return cls.mixture(data["uniform_weight"], comps, ell=data.get("ell"), envelope=data.get("envelope"))


def sample_density(n: int, spec: DensitySpec, world: World, seed: int, x_init) -> tuple[SampleSet, float]:
    """``n`` i.i.d. samples from ``spec`` plus the radius multiplier ``(1/ell)^(1/d)``."""
    if spec.kind == "uniform":
        return sample_free(n, world, seed, x_init), 1.0
    mult = spec.radius_multiplier(world.dim)
    x0 = as_point(x_init, world.dim)
    if n == 0:
        return SampleSet(x0[None, :], 0, seed, radius_multiplier=mult), mult
    env = spec.envelope_bound(world)
    rng = make_rng(seed, STREAM_SAMPLES)
    zeros, ones = np.zeros(world.dim), np.ones(world.dim)

    def accept(c):
        free = points_free(c, world)
        u = rng.random(c.shape[0])
        phi = np.zeros(c.shape[0])
        phi[free] = spec.relative_density(c[free], world)
        if np.any(phi > env * (1 + 1e-12)):
            raise SamplingError(f"density {phi.max():.6g} exceeds the declared envelope {env:.6g}")
        return free & (u * env < phi)

    pts = _rejection(rng, n, zeros, ones, accept, "density sampling")
    return SampleSet(np.vstack([x0, pts]), n, seed, radius_multiplier=mult), mult
