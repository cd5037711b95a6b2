"""Pair costs for straight-line connections.

Three cost models are supported:

* ``euclidean``: arc length.
* ``weighted``: axis-weighted Euclidean metric, optionally wrapping on some
  axes (angles scaled to ``[0, 1)``).
* ``field``: line integral of a positive scalar field along the segment.

Every model is symmetric with ``pair_cost(u, u) == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Sequence

import numpy as np

from .geometry import Aabb, as_point, unit_ball_volume, wrapped_delta


class CostModelError(ValueError):
    pass


# --------------------------------------------------------------------------
# scalar fields


class ConstantField:
    name = "constant"

    def __init__(self, value: float):
        self.value = float(value)

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.full(pts.shape[0], self.value)

    def segment_integrals(self, P, Q):
        return self.value * np.linalg.norm(Q - P, axis=-1)

    def to_dict(self):
        return {"name": self.name, "value": self.value}


class BoxRegionsField:
    """Piecewise-constant field: ``base`` everywhere except on disjoint boxes.

    Integrals along segments are exact: each box contributes the length of
    the parameter interval it clips from the segment.
    """

    name = "box-regions"

    def __init__(self, base: float, regions: Sequence[tuple[Aabb, float]]):
        self.base = float(base)
        self.regions = [(r if isinstance(r, Aabb) else Aabb(*r), float(v)) for r, v in regions]
        if self.regions:
            self._lo = np.stack([r.lo for r, _ in self.regions])
            self._hi = np.stack([r.hi for r, _ in self.regions])
            self._val = np.array([v for _, v in self.regions])

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.full(pts.shape[0], self.base)
        for box, value in self.regions:
            inside = np.all((pts >= box.lo) & (pts <= box.hi), axis=1)
            out[inside] = value
        return out

    def clipped_lengths(self, P, Q) -> np.ndarray:
        """Length of each segment inside each region, shape ``(m, regions)``."""
        P = np.atleast_2d(P)
        Q = np.atleast_2d(Q)
        D = Q - P
        length = np.linalg.norm(D, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / D[:, None, :]
            t1 = (self._lo[None] - P[:, None, :]) * inv
            t2 = (self._hi[None] - P[:, None, :]) * inv
        tnear = np.minimum(t1, t2)
        tfar = np.maximum(t1, t2)
        flat = D[:, None, :] == 0.0
        inside = (P[:, None, :] >= self._lo[None]) & (P[:, None, :] <= self._hi[None])
        tnear = np.where(flat, np.where(inside, -np.inf, np.inf), tnear)
        tfar = np.where(flat, np.where(inside, np.inf, -np.inf), tfar)
        enter = np.maximum(tnear.max(axis=2), 0.0)
        leave = np.minimum(tfar.min(axis=2), 1.0)
        return np.clip(leave - enter, 0.0, None) * length[:, None]

    def segment_integrals(self, P, Q):
        P = np.atleast_2d(P)
        Q = np.atleast_2d(Q)
        total = self.base * np.linalg.norm(Q - P, axis=1)
        if self.regions:
            total = total + self.clipped_lengths(P, Q) @ (self._val - self.base)
        return total

    def to_dict(self):
        return {
            "name": self.name,
            "base": self.base,
            "regions": [{"min": b.lo.tolist(), "max": b.hi.tolist(), "value": v} for b, v in self.regions],
        }


class RadialField:
    """``scale / |x - center|`` clipped to ``[f_min, f_max]``."""

    name = "radial"

    def __init__(self, center, scale: float, f_min: float, f_max: float):
        self.center = as_point(center)
        self.scale = float(scale)
        self.f_min = float(f_min)
        self.f_max = float(f_max)

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.linalg.norm(pts - self.center, axis=1)
        with np.errstate(divide="ignore"):
            raw = self.scale / r
        return np.clip(raw, self.f_min, self.f_max)

    segment_integrals = None

    def to_dict(self):
        return {
            "name": self.name,
            "center": self.center.tolist(),
            "scale": self.scale,
            "f_min": self.f_min,
            "f_max": self.f_max,
        }


def field_from_dict(data: dict):
    name = data["name"]
    if name == "constant":
        return ConstantField(data["value"])
    if name == "box-regions":
        regions = [(Aabb(r["min"], r["max"]), r["value"]) for r in data.get("regions", [])]
        return BoxRegionsField(data.get("base", 1.0), regions)
    if name == "radial":
        return RadialField(data["center"], data["scale"], data["f_min"], data["f_max"])
    raise CostModelError(f"unknown field {name!r}")


# --------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    kind: str = "adaptive-simpson"
    tolerance: float = 1e-8
    points: int = 16
    max_depth: int = 40

    def __post_init__(self):
        if self.kind not in ("adaptive-simpson", "fixed-gauss"):
            raise CostModelError(f"unknown quadrature {self.kind!r}")
        if self.tolerance <= 0 or self.points < 1:
            raise CostModelError("quadrature tolerance and point count must be positive")


def _gauss_integrals(f, P, Q, points: int) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(points)
    s = 0.5 * (nodes + 1.0)
    D = Q - P
    length = np.linalg.norm(D, axis=1)
    pts = P[:, None, :] + s[None, :, None] * D[:, None, :]
    vals = f(pts.reshape(-1, P.shape[1])).reshape(P.shape[0], points)
    return 0.5 * length * (vals @ weights)


def _simpson_integrals(f, P, Q, tol: float, max_depth: int) -> np.ndarray:
    """Adaptive Simpson on ``t -> f(P + t (Q - P)) |Q - P|``, vectorized over segments."""
    m, d = P.shape
    D = Q - P
    length = np.linalg.norm(D, axis=1)
    out = np.zeros(m)

    def g(idx, t):
        return f(P[idx] + t[:, None] * D[idx]) * length[idx]

    idx = np.arange(m)
    a = np.zeros(m)
    b = np.ones(m)
    fa = g(idx, a)
    fb = g(idx, b)
    fm = g(idx, 0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = np.full(m, tol)
    depth = 0
    while idx.size:
        mid = 0.5 * (a + b)
        lm = 0.5 * (a + mid)
        rm = 0.5 * (mid + b)
        flm = g(idx, lm)
        frm = g(idx, rm)
        left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        done = (np.abs(delta) <= 15.0 * eps) | (depth >= max_depth)
        np.add.at(out, idx[done], (left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        # split survivors into left and right halves
        idx = np.concatenate([idx[keep], idx[keep]])
        a, b = np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]])
        fa, fb = np.concatenate([fa[keep], fm[keep]]), np.concatenate([fm[keep], fb[keep]])
        fm, whole = np.concatenate([flm[keep], frm[keep]]), np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps[keep], eps[keep]]) / 2.0
        depth += 1
    return out


# --------------------------------------------------------------------------
# cost model


@dataclass(frozen=True, eq=False)
class CostModel:
    kind: str = "euclidean"
    weights: np.ndarray | None = None
    wrap: np.ndarray | None = None
    field: object = None
    f_lower: float | None = None
    f_upper: float | None = None
    quadrature: QuadratureRule = dc_field(default_factory=QuadratureRule)
    radius_factor: str = "upper"

    def __post_init__(self):
        if self.kind == "euclidean":
            return
        if self.kind == "weighted":
            if self.weights is None:
                raise CostModelError("weighted metric needs per-axis weights")
            w = np.asarray(self.weights, dtype=float)
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise CostModelError("metric weights must be positive and finite")
            object.__setattr__(self, "weights", w)
            wrap = np.zeros(w.shape[0], dtype=bool) if self.wrap is None else np.asarray(self.wrap, dtype=bool)
            if wrap.shape != w.shape:
                raise CostModelError("wrap flags must match the weights")
            object.__setattr__(self, "wrap", wrap)
            return
        if self.kind == "field":
            if self.field is None or self.f_lower is None or self.f_upper is None:
                raise CostModelError("line-integral cost needs a field and f_lower/f_upper")
            if not 0.0 < self.f_lower <= self.f_upper < math.inf:
                raise CostModelError("need 0 < f_lower <= f_upper < inf")
            if self.radius_factor not in ("upper", "ratio"):
                raise CostModelError(f"unknown radius factor {self.radius_factor!r}")
            self._spot_check_bounds()
            return
        raise CostModelError(f"unknown cost model {self.kind!r}")

    # -- construction helpers

    @classmethod
    def euclidean(cls) -> "CostModel":
        return cls("euclidean")

    @classmethod
    def weighted_metric(cls, weights, wrap=None) -> "CostModel":
        return cls("weighted", weights=weights, wrap=wrap)

    @classmethod
    def line_integral(cls, field, f_lower, f_upper, quadrature=None, radius_factor="upper") -> "CostModel":
        return cls(
            "field",
            field=field,
            f_lower=float(f_lower),
            f_upper=float(f_upper),
            quadrature=quadrature or QuadratureRule(),
            radius_factor=radius_factor,
        )

    def _spot_check_bounds(self, dim: int | None = None, count: int = 2000):
        dim = dim or self._field_dim()
        if dim is None:
            return
        rng = np.random.Generator(np.random.Philox(12345))
        self._check_values(self.field.evaluate(rng.random((count, dim))))
        if isinstance(self.field, BoxRegionsField):
            self._check_values(np.array([v for _, v in self.field.regions] + [self.field.base]))

    def _field_dim(self):
        f = self.field
        if isinstance(f, RadialField):
            return f.center.shape[0]
        if isinstance(f, BoxRegionsField) and f.regions:
            return f.regions[0][0].dim
        return 2 if isinstance(f, ConstantField) else None

    def _check_values(self, vals):
        tol = 1e-12 * max(1.0, self.f_upper)
        if vals.size and (vals.min() < self.f_lower - tol or vals.max() > self.f_upper + tol):
            raise CostModelError(
                f"field values [{vals.min():.6g}, {vals.max():.6g}] leave the declared bounds "
                f"[{self.f_lower}, {self.f_upper}]"
            )

    # -- properties used by the planners

    @property
    def is_metric(self) -> bool:
        return self.kind in ("euclidean", "weighted")

    @property
    def wrapped(self) -> np.ndarray | None:
        return self.wrap if self.kind == "weighted" and self.wrap is not None and self.wrap.any() else None

    def radius_multiplier(self) -> float:
        """Extra factor on the connection radius implied by the cost model."""
        if self.kind != "field":
            return 1.0
        if self.radius_factor == "ratio":
            return self.f_upper / self.f_lower
        return self.f_upper

    def euclidean_reach(self, r: float) -> float:
        """Euclidean radius guaranteed to contain the cost ball of radius ``r``."""
        if self.kind == "euclidean":
            return r
        if self.kind == "weighted":
            return r / float(self.weights.min())
        return r / self.f_lower

    # -- evaluation

    def pair_costs(self, u, V) -> np.ndarray:
        """Costs from ``u`` to every row of ``V``."""
        u = np.asarray(u, dtype=float)
        V = np.atleast_2d(np.asarray(V, dtype=float))
        return self.segment_costs(np.broadcast_to(u, V.shape), V)

    def segment_costs(self, P, Q) -> np.ndarray:
        """Costs of the segments ``P[i] -> Q[i]``."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if P.shape != Q.shape:
            raise CostModelError("segment endpoint arrays differ in shape")
        if self.kind == "euclidean":
            D = Q - P
            return np.sqrt(np.einsum("ij,ij->i", D, D))
        if self.kind == "weighted":
            if P.shape[1] != self.weights.shape[0]:
                raise CostModelError("dimension mismatch with metric weights")
            D = wrapped_delta(P, Q, self.wrap) * self.weights
            return np.sqrt(np.einsum("ij,ij->i", D, D))
        return self._line_integrals(P, Q)

    def _line_integrals(self, P, Q) -> np.ndarray:
        # orient every segment canonically so the value is exactly symmetric
        swap = _lex_greater(P, Q)
        if swap.any():
            P, Q = np.where(swap[:, None], Q, P), np.where(swap[:, None], P, Q)
        f = self.field
        exact = getattr(f, "segment_integrals", None)
        if exact is not None:
            return exact(P, Q)
        check = self._checked_eval
        if self.quadrature.kind == "fixed-gauss":
            return _gauss_integrals(check, P, Q, self.quadrature.points)
        return _simpson_integrals(check, P, Q, self.quadrature.tolerance, self.quadrature.max_depth)

    def _checked_eval(self, pts):
        vals = self.field.evaluate(pts)
        self._check_values(vals)
        return vals

    def to_dict(self) -> dict:
        if self.kind == "euclidean":
            return {"kind": "euclidean"}
        if self.kind == "weighted":
            return {"kind": "weighted", "weights": self.weights.tolist(), "wrap": self.wrap.tolist()}
        out = {
            "kind": "field",
            "field": self.field.to_dict(),
            "f_lower": self.f_lower,
            "f_upper": self.f_upper,
            "radius_factor": self.radius_factor,
        }
        if self.quadrature != QuadratureRule():
            out["quadrature"] = {
                "kind": self.quadrature.kind,
                "tolerance": self.quadrature.tolerance,
                "points": self.quadrature.points,
            }
        return out

    @classmethod
    def from_dict(cls, data: dict | None) -> "CostModel":
        if not data or data.get("kind", "euclidean") == "euclidean":
            return cls.euclidean()
        kind = data["kind"]
        if kind == "weighted":
            return cls.weighted_metric(data["weights"], data.get("wrap"))
        if kind == "field":
            q = data.get("quadrature")
            quad = QuadratureRule(**q) if q else None
            return cls.line_integral(
                field_from_dict(data["field"]),
                data["f_lower"],
                data["f_upper"],
                quadrature=quad,
                radius_factor=data.get("radius_factor", "upper"),
            )
        raise CostModelError(f"unknown cost model {kind!r}")


def _lex_greater(P, Q) -> np.ndarray:
    """Row-wise lexicographic ``P > Q``."""
    neq = P != Q
    first = np.argmax(neq, axis=1)
    rows = np.arange(P.shape[0])
    return neq[rows, first] & (P[rows, first] > Q[rows, first])


def pair_cost(model: CostModel, u, v) -> float:
    """Cost of the straight segment from ``u`` to ``v`` under ``model``."""
    u = as_point(u)
    v = as_point(v, u.shape[0])
    return float(model.segment_costs(u[None, :], v[None, :])[0])


def path_cost(model: CostModel, path) -> float:
    path = np.atleast_2d(np.asarray(path, dtype=float))
    if path.shape[0] < 2:
        return 0.0
    return float(model.segment_costs(path[:-1], path[1:]).sum())


def metric_ball_volume(model: CostModel, d: int, samples: int = 400_000, seed: int = 0) -> float:
    """Lebesgue measure of the unit cost ball ``{x : dist(0, x) < 1}``."""
    if model.kind == "euclidean":
        return unit_ball_volume(d)
    if model.kind != "weighted":
        raise CostModelError("unit cost-ball volume is only defined for metric costs")
    w = model.weights
    if w.shape[0] != d:
        raise CostModelError("dimension mismatch with metric weights")
    semi_axes = 1.0 / w
    if not np.any(model.wrap & (semi_axes > 0.5)):
        return unit_ball_volume(d) / float(np.prod(w))
    # the ball wraps onto itself: estimate on the bounding box
    ext = np.where(model.wrap, np.minimum(semi_axes, 0.5), semi_axes)
    rng = np.random.Generator(np.random.Philox(seed))
    pts = (rng.random((samples, d)) * 2.0 - 1.0) * ext
    inside = model.pair_costs(np.zeros(d), pts) < 1.0
    return float(inside.mean() * np.prod(2.0 * ext))
