import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmtstar.costs import CostModel, path_cost
from fmtstar.geometry import Aabb, World, path_collision_free
from fmtstar.planners import Stats, fmt_plan
from fmtstar.environments import ClutterSpec, random_clutter
from fmtstar.smoothing import SmoothingError, SmoothParams, adaptive_shortcut

EMPTY = World(2, ())
WALL = World(2, (Aabb([0.4, 0.0], [0.6, 0.7]),))
EUC = CostModel.euclidean()


def test_two_point_path_unchanged():
    path = np.array([[0.1, 0.1], [0.9, 0.9]])
    out = adaptive_shortcut(path, EMPTY)
    np.testing.assert_array_equal(out, path)


def test_zigzag_becomes_straight():
    path = np.array([[0.0, 0.0], [0.5, 0.4], [1.0, 0.0]])
    out = adaptive_shortcut(path, EMPTY)
    assert path_cost(EUC, out) == pytest.approx(1.0, abs=1e-3)


def test_detour_around_wall_tightens():
    path = np.array([[0.1, 0.1], [0.1, 0.9], [0.9, 0.9], [0.9, 0.1]])
    out = adaptive_shortcut(path, WALL, params=SmoothParams(max_rounds=60, stall_rounds=4))
    assert path_collision_free(out, WALL)
    # the best path bends over the wall's top corners: 2 * |(0.3, 0.6)| + 0.2
    best = 2 * np.hypot(0.3, 0.6) + 0.2
    assert path_cost(EUC, out) < 1.05 * best
    assert path_cost(EUC, out) >= best - 1e-9


def test_colliding_input_is_rejected():
    with pytest.raises(SmoothingError):
        adaptive_shortcut([[0.1, 0.5], [0.9, 0.5]], WALL)


def test_param_validation():
    with pytest.raises(SmoothingError):
        SmoothParams(max_rounds=1, stall_rounds=2)
    with pytest.raises(SmoothingError):
        SmoothParams(stall_rounds=0)
    with pytest.raises(SmoothingError):
        SmoothParams(relax_steps=(1.5,))


def test_checks_are_counted_and_capped():
    path = np.array([[0.1, 0.1], [0.1, 0.9], [0.9, 0.9], [0.9, 0.1]])
    st_ = Stats()
    adaptive_shortcut(path, WALL, stats=st_)
    assert st_.smoothing_collision_checks > 0
    capped = Stats()
    out = adaptive_shortcut(path, WALL, params=SmoothParams(max_checks=5), stats=capped)
    assert capped.smoothing_collision_checks <= 5
    assert path_collision_free(out, WALL)


def test_deterministic_given_seed():
    p = random_clutter(ClutterSpec(count=20, coverage=0.2), 3)
    res = fmt_plan(p, n=500, seed=3)
    a = adaptive_shortcut(res.path, p.world, params=SmoothParams(seed=9))
    b = adaptive_shortcut(res.path, p.world, params=SmoothParams(seed=9))
    np.testing.assert_array_equal(a, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5_000), st.integers(0, 100), st.integers(1, 3))
def test_contract_on_planner_paths(seed, smooth_seed, subdivide):
    p = random_clutter(ClutterSpec(count=15, coverage=0.2), seed)
    res = fmt_plan(p, n=300, seed=seed)
    if not res.success or res.path.shape[0] < 3:
        return
    out = adaptive_shortcut(res.path, p.world, p.cost, SmoothParams(seed=smooth_seed, subdivide=subdivide))
    np.testing.assert_array_equal(out[0], res.path[0])
    np.testing.assert_array_equal(out[-1], res.path[-1])
    assert path_collision_free(out, p.world)
    assert path_cost(p.cost, out) <= path_cost(p.cost, res.path)
