import math

import numpy as np
import pytest

from fmtstar.environments import crosses_block, cost_field_demo
from fmtstar.geometry import Aabb, GoalRegion, World
from fmtstar.oracles import (
    METRICATION,
    GridSpec,
    OracleError,
    complete_graph_oracle,
    exhaustive_shortest_path,
    figure3_conditions,
    figure3_instance,
    grid_dijkstra,
)
from fmtstar.planners import disk_graph_shortest_path
from fmtstar.problem import ProblemDef
from fmtstar.sampling import SampleSet


def corner(world=World(2, ())):
    return ProblemDef(world, [0.001, 0.001], GoalRegion.ball([0.999, 0.999], 0.0015))


def test_grid_empty_square_diagonal():
    cost = grid_dijkstra(corner(), GridSpec(256))
    assert cost == pytest.approx(math.sqrt(2), abs=0.09)


def test_axis_grid_pays_manhattan():
    cost = grid_dijkstra(corner(), GridSpec(64, "axis-neighbors"))
    assert cost == pytest.approx(2.0, abs=0.05)
    assert cost <= METRICATION["axis-neighbors"] * math.sqrt(2) + 0.05


def test_grid_blocked_goal_is_infeasible():
    w = World(2, (Aabb([0.8, 0.8], [1.0, 1.0]),))
    p = ProblemDef(w, [0.1, 0.1], GoalRegion.ball([0.9, 0.9], 0.05))
    assert math.isinf(grid_dijkstra(p, GridSpec(64)))


def test_grid_cost_falls_as_gap_widens():
    costs = []
    for gap in (0.1, 0.2, 0.4):
        w = World(2, (Aabb([0.45, 0.0], [0.55, 1.0 - gap]),))
        p = ProblemDef(w, [0.1, 0.1], GoalRegion.ball([0.9, 0.1], 0.05))
        costs.append(grid_dijkstra(p, GridSpec(128)))
    assert costs[0] > costs[1] > costs[2]


def test_grid_never_undercuts_known_optimum():
    # one wall; optimum bends over its top corners
    w = World(2, (Aabb([0.45, 0.0], [0.55, 0.6]),))
    p = ProblemDef(w, [0.1, 0.1], GoalRegion.ball([0.9, 0.1], 0.05))
    best = 2 * math.hypot(0.35, 0.5) + 0.1 - 0.05
    cost = grid_dijkstra(p, GridSpec(256))
    assert best - 0.01 <= cost <= METRICATION["full-diagonal"] * best + 0.01


def test_grid_spec_validation():
    with pytest.raises(OracleError):
        GridSpec(8)
    with pytest.raises(OracleError):
        GridSpec(64, "hex")


def test_exhaustive_small_examples():
    p = ProblemDef(World(2, ()), [0.1, 0.5], GoalRegion.ball([0.5, 0.5], 0.01))
    two = SampleSet(np.array([[0.1, 0.5], [0.5, 0.5]]), 1)
    assert exhaustive_shortest_path(two, 0.5, p) == pytest.approx(0.4)
    assert math.isinf(exhaustive_shortest_path(two, 0.3, p))
    with pytest.raises(OracleError):
        exhaustive_shortest_path(SampleSet(np.tile([0.1, 0.5], (30, 1)), 29), 0.5, p)


@pytest.mark.parametrize("seed", range(20))
def test_exhaustive_equals_dijkstra_on_ten_nodes(seed):
    rng = np.random.default_rng(100 + seed)
    w = World(2, (Aabb([0.3, 0.3], [0.6, 0.5]),))
    pts = rng.random((40, 2))
    pts = pts[~np.all((pts >= [0.3, 0.3]) & (pts <= [0.6, 0.5]), axis=1)][:10]
    p = ProblemDef(w, [0.1, 0.1], GoalRegion.ball([0.8, 0.8], 0.2))
    s = SampleSet(np.vstack([p.x_init, pts]), 10)
    r = 0.5
    a = exhaustive_shortest_path(s, r, p)
    b = disk_graph_shortest_path(p, s, r)
    assert math.isinf(a) == (not b.success)
    if b.success:
        assert a == pytest.approx(b.cost, abs=1e-12)


def test_lazy_instance_predicates():
    p, s, r = figure3_instance()
    assert all(figure3_conditions(p, s, r).values())
    assert not figure3_conditions(*figure3_instance("no-obstacle"))["d"]
    assert not figure3_conditions(*figure3_instance("u2-not-costlier"))["b"]
    assert not figure3_conditions(*figure3_instance("u2-not-cheaper"))["c"]
    with pytest.raises(OracleError):
        figure3_instance("bogus")


@pytest.mark.parametrize("kind,cost,through", [("high-cost-block", 0.75, True), ("higher-cost-block", 0.95765, False)])
def test_complete_graph_oracle_on_block_fields(kind, cost, through):
    got, path = complete_graph_oracle(cost_field_demo(kind))
    assert got == pytest.approx(cost, abs=1e-4)
    assert crosses_block(path) == through
