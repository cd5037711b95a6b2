import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmtstar.costs import (
    BoxRegionsField,
    ConstantField,
    CostModel,
    CostModelError,
    QuadratureRule,
    RadialField,
    _gauss_integrals,
    _simpson_integrals,
    metric_ball_volume,
    pair_cost,
    path_cost,
)
from fmtstar.geometry import Aabb, unit_ball_volume


class LinearField:
    """f(x) = x_1 + offset; used to check quadrature against closed forms."""

    name = "linear"
    segment_integrals = None

    def __init__(self, offset=0.0):
        self.offset = offset

    def evaluate(self, points):
        return np.atleast_2d(points)[:, 0] + self.offset


class WavyField:
    name = "wavy"
    segment_integrals = None

    def evaluate(self, points):
        p = np.atleast_2d(points)
        return 2.0 + np.sin(6 * p[:, 0]) * np.cos(4 * p[:, 1])


def test_pair_cost_examples():
    assert pair_cost(CostModel.euclidean(), [0, 0], [0.6, 0.8]) == pytest.approx(1.0)
    const = CostModel.line_integral(ConstantField(2.0), 2.0, 2.0)
    assert pair_cost(const, [0.1, 0.1], [0.4, 0.5]) == pytest.approx(1.0)
    # f(x) = x_1 vanishes at the start, outside any model's f > 0 bound, so
    # the rule is exercised directly
    P, Q = np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]])
    assert _simpson_integrals(LinearField().evaluate, P, Q, 1e-8, 40)[0] == pytest.approx(0.5, abs=1e-12)
    assert _gauss_integrals(LinearField().evaluate, P, Q, 4)[0] == pytest.approx(0.5, abs=1e-12)
    shifted = CostModel.line_integral(LinearField(1.0), 1.0, 2.0)
    assert pair_cost(shifted, [0, 0], [1, 0]) == pytest.approx(1.5, abs=1e-9)


def test_zero_length_and_symmetry():
    for model in (
        CostModel.euclidean(),
        CostModel.weighted_metric([1.0, 3.0], wrap=[True, False]),
        CostModel.line_integral(WavyField(), 1.0, 3.0),
    ):
        assert pair_cost(model, [0.3, 0.4], [0.3, 0.4]) == 0.0
        assert pair_cost(model, [0.1, 0.7], [0.8, 0.2]) == pair_cost(model, [0.8, 0.2], [0.1, 0.7])


def test_metric_ball_volume_examples():
    assert metric_ball_volume(CostModel.euclidean(), 2) == pytest.approx(math.pi)
    assert metric_ball_volume(CostModel.weighted_metric([2.0, 1.0]), 2) == pytest.approx(math.pi / 2)
    assert metric_ball_volume(CostModel.weighted_metric([1.0] * 4), 4) == pytest.approx(unit_ball_volume(4))
    with pytest.raises(CostModelError):
        metric_ball_volume(CostModel.line_integral(ConstantField(1.0), 1.0, 1.0), 2)


def test_wrapped_ball_volume_is_clipped():
    # weights 1 with wrap on both axes: the unit ball overflows the torus
    model = CostModel.weighted_metric([1.0, 1.0], wrap=[True, True])
    assert metric_ball_volume(model, 2) == pytest.approx(1.0, abs=0.01)


def test_wraparound_uses_the_short_arc():
    model = CostModel.weighted_metric([1.0, 1.0], wrap=[True, False])
    assert pair_cost(model, [0.05, 0.5], [0.95, 0.5]) == pytest.approx(0.1)


def test_field_bounds_are_enforced():
    with pytest.raises(CostModelError):
        CostModel.line_integral(ConstantField(5.0), 1.0, 2.0)
    with pytest.raises(CostModelError):
        CostModel.line_integral(ConstantField(1.0), 0.0, 2.0)
    with pytest.raises(CostModelError):
        CostModel.weighted_metric([1.0, -1.0])


def test_box_regions_are_exact():
    block = Aabb([0.4, 0.0], [0.6, 1.0])
    model = CostModel.line_integral(BoxRegionsField(1.0, [(block, 3.0)]), 1.0, 3.0)
    # 0.2 inside at cost 3, 0.8 outside at cost 1
    assert pair_cost(model, [0.0, 0.5], [1.0, 0.5]) == pytest.approx(1.4, abs=1e-12)
    assert pair_cost(model, [0.0, 0.5], [0.3, 0.5]) == pytest.approx(0.3, abs=1e-12)


def test_radius_multiplier_knob():
    field = ConstantField(2.0)
    assert CostModel.line_integral(field, 1.0, 2.0).radius_multiplier() == 2.0
    assert CostModel.line_integral(field, 0.5, 2.0, radius_factor="ratio").radius_multiplier() == 4.0
    assert CostModel.euclidean().radius_multiplier() == 1.0


def test_json_round_trip():
    models = [
        CostModel.euclidean(),
        CostModel.weighted_metric([1.0, 2.0], wrap=[False, True]),
        CostModel.line_integral(BoxRegionsField(1.0, [(Aabb([0.4, 0.2], [0.6, 0.8]), 2.0)]), 1.0, 2.0),
        CostModel.line_integral(RadialField([0.5, 0.5], 0.15, 1.0, 4.0), 1.0, 4.0, QuadratureRule("fixed-gauss", points=12)),
    ]
    P = np.random.default_rng(0).random((20, 2))
    Q = np.random.default_rng(1).random((20, 2))
    for m in models:
        back = CostModel.from_dict(m.to_dict())
        np.testing.assert_allclose(back.segment_costs(P, Q), m.segment_costs(P, Q), rtol=1e-12)


def _riemann(field, p, q, m=1_000_000):
    t = (np.arange(m) + 0.5) / m
    pts = p + t[:, None] * (q - p)
    return field.evaluate(pts).mean() * np.linalg.norm(q - p)


def test_simpson_matches_dense_riemann_sum():
    field = WavyField()
    model = CostModel.line_integral(field, 1.0, 3.0)
    rng = np.random.default_rng(3)
    for _ in range(5):
        p, q = rng.random(2), rng.random(2)
        ref = _riemann(field, p, q)
        assert pair_cost(model, p, q) == pytest.approx(ref, rel=1e-6)


def test_gauss_matches_dense_riemann_sum():
    field = RadialField([0.5, 0.5], 0.15, 1.0, 4.0)
    model = CostModel.line_integral(field, 1.0, 4.0, QuadratureRule("fixed-gauss", points=64))
    # a segment that stays in the smooth part of the field
    p, q = np.array([0.05, 0.1]), np.array([0.2, 0.9])
    assert pair_cost(model, p, q) == pytest.approx(_riemann(field, p, q), rel=1e-6)


def test_path_cost_sums_segments():
    path = [[0, 0], [0.3, 0.4], [0.3, 1.0]]
    assert path_cost(CostModel.euclidean(), path) == pytest.approx(1.1)
    assert path_cost(CostModel.euclidean(), [[0.2, 0.2]]) == 0.0


def test_quadrature_validation():
    with pytest.raises(CostModelError):
        QuadratureRule(tolerance=0.0)
    with pytest.raises(CostModelError):
        QuadratureRule("trapezoid")


def test_triangle_inequality_on_many_triples():
    rng = np.random.default_rng(9)
    for model in (CostModel.euclidean(), CostModel.weighted_metric([1.0, 2.5, 0.5], wrap=[True, False, True])):
        A, B, C = rng.random((3, 10_000, 3))
        ab, bc, ac = model.segment_costs(A, B), model.segment_costs(B, C), model.segment_costs(A, C)
        assert np.all(ac <= ab + bc + 1e-12)


pt = st.tuples(st.floats(0, 1), st.floats(0, 1))


@settings(max_examples=100, deadline=None)
@given(pt, pt)
def test_line_integral_bounds(u, v):
    block = Aabb([0.4, 0.154], [0.6, 0.846])
    for model in (
        CostModel.line_integral(BoxRegionsField(1.0, [(block, 4.0)]), 1.0, 4.0),
        CostModel.line_integral(WavyField(), 1.0, 3.0),
    ):
        c = pair_cost(model, u, v)
        length = math.dist(u, v)
        assert model.f_lower * length - 1e-9 <= c <= model.f_upper * length + 1e-9
