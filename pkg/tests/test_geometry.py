import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmtstar.geometry import (
    Aabb,
    CollisionChecker,
    GeometryError,
    GoalRegion,
    MeasureError,
    World,
    clearance,
    free_space_measure,
    inflate_obstacles,
    monte_carlo_standard_error,
    point_free,
    points_free,
    segment_collision_free,
    segments_collision_free,
    unit_ball_volume,
)
from fmtstar.environments import ClutterSpec, random_clutter

BOX = Aabb([0.4, 0.4], [0.6, 0.6])


@pytest.mark.parametrize("d,expected", [(1, 2.0), (2, 3.14159265), (3, 4.18879020)])
def test_unit_ball_volume(d, expected):
    assert unit_ball_volume(d) == pytest.approx(expected, abs=1e-8)


def test_segment_examples():
    w = World(2, (BOX,))
    assert not segment_collision_free([0.1, 0.1], [0.9, 0.9], w)
    assert segment_collision_free([0.1, 0.9], [0.3, 0.9], w)
    assert not segment_collision_free([0.5, 0.5], [0.5, 0.5], w)


def test_touching_a_face_is_a_collision():
    w = World(2, (BOX,))
    assert not segment_collision_free([0.1, 0.4], [0.9, 0.4], w)
    assert segment_collision_free([0.1, 0.39], [0.9, 0.39], w)


def test_dimension_mismatch():
    w = World(2, (BOX,))
    with pytest.raises(GeometryError):
        segment_collision_free([0.1, 0.1, 0.1], [0.2, 0.2, 0.2], w)


def test_clearance_examples():
    w = World(2, (Aabb([0.7, 0.4], [0.8, 0.6]),))
    assert clearance([0.5, 0.5], w, boundary=False) == pytest.approx(0.2)
    assert clearance([0.75, 0.5], w) == 0.0
    assert clearance([0.5, 0.5], World(2, ())) == pytest.approx(0.5)


def test_free_space_measure_examples():
    assert World(2, (BOX,)).mu_free == pytest.approx(0.96)
    assert World(3, ()).mu_free == 1.0
    w = World(2, (Aabb([0, 0], [0.5, 0.5]), Aabb([0.25, 0.25], [0.75, 0.75])))
    with pytest.raises(MeasureError):
        free_space_measure(w, "exact-disjoint")
    assert free_space_measure(w, "grid", resolution=1024) == pytest.approx(0.5625, abs=1e-3)
    assert w.mu_free == pytest.approx(0.5625, abs=1e-3)


def test_grid_and_monte_carlo_measures_agree():
    for seed in range(3):
        w = random_clutter(ClutterSpec(count=20, coverage=0.3, disjoint=False), seed).world
        grid = free_space_measure(w, "grid", resolution=1024)
        mc = free_space_measure(w, "monte-carlo", samples=200_000, seed=seed)
        assert abs(grid - mc) <= 3 * monte_carlo_standard_error(grid, 200_000) + 1e-3


def test_inflate_examples():
    w = World(2, (BOX,))
    assert inflate_obstacles(w, [0, 0]).obstacles == w.obstacles
    grown = inflate_obstacles(w, [0.1, 0.1]).obstacles[0]
    np.testing.assert_allclose(grown.lo, [0.3, 0.3])
    np.testing.assert_allclose(grown.hi, [0.7, 0.7])
    edge = inflate_obstacles(World(2, (Aabb([0.05, 0.4], [0.2, 0.6]),)), [0.1, 0.0]).obstacles[0]
    assert edge.lo[0] == 0.0


def test_world_rejects_bad_obstacles():
    with pytest.raises(GeometryError):
        World(2, (Aabb([0.5, 0.5], [1.2, 0.6]),))
    with pytest.raises(GeometryError):
        World(1, ())
    with pytest.raises(GeometryError):
        Aabb([0.6, 0.4], [0.5, 0.6])


def test_goal_regions_are_open():
    g = GoalRegion.ball([0.5, 0.5], 0.25)
    assert g.contains([0.625, 0.5])
    assert not g.contains([0.75, 0.5])
    b = GoalRegion.box([0.2, 0.2], [0.4, 0.4])
    assert b.contains([0.3, 0.3]) and not b.contains([0.4, 0.3])
    with pytest.raises(GeometryError):
        GoalRegion.ball([0.5, 0.5], 0.0)


def test_world_json_round_trip():
    w = World(2, (BOX, Aabb([0.1, 0.1], [0.2, 0.3])))
    back = World.from_dict(w.to_dict())
    assert back.obstacles == w.obstacles and back.mu_free == pytest.approx(w.mu_free)


def test_checker_matches_functions():
    rng = np.random.default_rng(0)
    w = random_clutter(ClutterSpec(count=15), 1).world
    P, Q = rng.random((300, 2)), rng.random((300, 2))
    chk = CollisionChecker(w)
    expect = segments_collision_free(P, Q, w)
    np.testing.assert_array_equal(chk.free_many(P, Q), expect)
    assert [chk.free(p, q) for p, q in zip(P, Q)] == expect.tolist()


def _dense_free(p, q, w, eps):
    m = max(2, int(math.ceil(np.linalg.norm(q - p) / (eps / 2))) + 1)
    pts = p + np.linspace(0, 1, m)[:, None] * (q - p)
    return pts


@pytest.mark.parametrize("d", [2, 3])
def test_clear_segments_agree_with_point_sampling(d):
    # if a segment keeps eps away from every obstacle, the slab test must
    # call it free; if a dense sample hits an obstacle, it must call it blocked
    rng = np.random.default_rng(d)
    w = random_clutter(ClutterSpec(dim=d, count=10, coverage=0.2), d).world
    eps = 0.01
    agree = 0
    for _ in range(1000):
        p, q = rng.random(d), rng.random(d)
        pts = _dense_free(p, q, w, eps)
        gaps = np.array([clearance(x, w, boundary=False) for x in pts])
        got = segment_collision_free(p, q, w)
        if gaps.min() >= eps:
            assert got
            agree += 1
        if not points_free(pts, w).all():
            assert not got
    assert agree > 0


coord = st.floats(0.0, 1.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(coord, min_size=4, max_size=4))
def test_segment_symmetry(c):
    w = World(2, (BOX, Aabb([0.1, 0.7], [0.3, 0.9])))
    p, q = np.array(c[:2]), np.array(c[2:])
    assert segment_collision_free(p, q, w) == segment_collision_free(q, p, w)


@settings(max_examples=100, deadline=None)
@given(st.lists(coord, min_size=2, max_size=2))
def test_point_free_matches_clearance(c):
    w = World(2, (BOX,))
    x = np.array(c)
    if point_free(x, w):
        assert clearance(x, w, boundary=False) > 0 or not BOX.contains(x)
    else:
        assert clearance(x, w, boundary=False) == 0.0
