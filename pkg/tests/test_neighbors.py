import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmtstar.costs import ConstantField, CostModel
from fmtstar.neighbors import (
    NeighborError,
    NeighborIndex,
    build_index,
    knn_neighbors,
    mutual_knn_neighbors,
    radius_neighbors,
)

LINE = np.array([[0.1, 0.5], [0.5, 0.5], [0.9, 0.5]])


def brute_radius(pts, v, r):
    d = np.linalg.norm(pts - pts[v], axis=1)
    return sorted(u for u in range(len(pts)) if u != v and d[u] < r)


def brute_knn(pts, v, k):
    d = np.linalg.norm(pts - pts[v], axis=1)
    order = sorted((d[u], u) for u in range(len(pts)) if u != v)
    return [u for _, u in order[:k]]


def brute_mutual(pts, v, k):
    return sorted(u for u in brute_knn(pts, v, k) if v in brute_knn(pts, u, k))


def test_single_point():
    idx = build_index(np.array([[0.5, 0.5]]))
    assert len(radius_neighbors(idx, 0, 10.0)) == 0


def test_collinear_examples():
    idx = build_index(LINE)
    assert sorted(radius_neighbors(idx, 1, 0.45).idx.tolist()) == [0, 2]
    assert knn_neighbors(idx, 0, 1).idx.tolist() == [1]
    assert len(radius_neighbors(idx, 1, 0.1)) == 0
    assert len(radius_neighbors(idx, 1, np.sqrt(2) + 1e-9)) == 2


def test_knn_all_and_truncated():
    idx = build_index(LINE)
    full = knn_neighbors(idx, 0, 2)
    assert full.idx.tolist() == [1, 2] and not full.truncated
    over = knn_neighbors(idx, 0, 5)
    assert over.truncated and len(over) == 2


def test_mutual_examples():
    two = build_index(np.array([[0.2, 0.2], [0.4, 0.4]]))
    assert mutual_knn_neighbors(two, 0, 1).idx.tolist() == [1]
    assert mutual_knn_neighbors(two, 1, 1).idx.tolist() == [0]
    cluster = build_index(np.array([[0.0, 0.0], [0.1, 0.0], [0.9, 0.0]]))
    assert len(mutual_knn_neighbors(cluster, 2, 1)) == 0
    assert brute_mutual(cluster.points, 2, 1) == []


def test_strict_radius_and_sorting():
    pts = np.array([[0.5, 0.5], [0.75, 0.5], [0.25, 0.5], [0.5, 0.8]])
    ns = radius_neighbors(build_index(pts), 0, 0.25)
    assert len(ns) == 0  # both at exactly 0.25 are excluded
    ns = radius_neighbors(build_index(pts), 0, 0.26)
    assert ns.idx.tolist() == [1, 2]  # tie broken by index
    assert np.all(ns.dist > 0) and np.all(np.diff(ns.dist) >= 0)


def test_memo_returns_same_object_and_counts_once():
    idx = build_index(np.random.default_rng(0).random((50, 2)))
    a = idx.radius(3, 0.2)
    b = idx.radius(3, 0.2)
    assert a is b and idx.near_computations == 1
    idx.radius(3, 0.3)
    assert idx.near_computations == 2


def test_cost_evaluations_count_unique_pairs():
    pts = np.random.default_rng(1).random((100, 2))
    idx = build_index(pts)
    for v in range(100):
        idx.radius(v, 0.2)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    candidates = int(((d < 0.2 * (1 + 1e-9)) & ~np.eye(100, dtype=bool)).sum() // 2)
    assert idx.cost_evaluations == candidates


def test_invalid_queries():
    idx = build_index(LINE)
    with pytest.raises(NeighborError):
        idx.radius(0, 0.0)
    with pytest.raises(NeighborError):
        idx.knn(0, 0)
    field = CostModel.line_integral(ConstantField(1.0), 1.0, 1.0)
    with pytest.raises(NeighborError):
        NeighborIndex(LINE, field).knn(0, 1)


def test_random_radius_queries_match_brute_force():
    rng = np.random.default_rng(5)
    pts = rng.random((1000, 2))
    idx = build_index(pts)
    for v in rng.integers(0, 1000, 100):
        r = rng.uniform(0.01, 0.2)
        assert sorted(idx.radius(int(v), r).idx.tolist()) == brute_radius(pts, v, r)


def test_weighted_metric_radius_matches_brute_force():
    rng = np.random.default_rng(2)
    pts = rng.random((300, 3))
    model = CostModel.weighted_metric([2.0, 1.0, 0.5], wrap=[False, False, True])
    idx = NeighborIndex(pts, model)
    for v in range(0, 300, 7):
        d = model.pair_costs(pts[v], pts)
        expect = sorted(u for u in range(300) if u != v and d[u] < 0.3)
        assert sorted(idx.radius(v, 0.3).idx.tolist()) == expect


@settings(max_examples=200, deadline=None)
@given(
    st.integers(0, 10_000),
    st.sampled_from([2, 3, 5]),
    st.integers(2, 500),
    st.integers(1, 30),
    st.floats(0.02, 0.6),
)
def test_queries_match_brute_force(seed, d, n, k, r):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, d))
    idx = build_index(pts)
    for v in rng.integers(0, n, 3).tolist():
        assert sorted(idx.radius(v, r).idx.tolist()) == brute_radius(pts, v, r)
        assert idx.knn(v, k).idx.tolist() == brute_knn(pts, v, k)
        assert sorted(idx.mutual_knn(v, k).idx.tolist()) == brute_mutual(pts, v, k)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_mutuality_is_symmetric(seed, k):
    pts = np.random.default_rng(seed).random((60, 2))
    idx = build_index(pts)
    for v in range(60):
        for u in idx.mutual_knn(v, k).idx.tolist():
            assert v in idx.mutual_knn(u, k)


def test_knn_ties_use_smaller_index():
    pts = np.array([[0.5, 0.5], [0.6, 0.5], [0.4, 0.5], [0.5, 0.6], [0.5, 0.4]])
    assert build_index(pts).knn(0, 2).idx.tolist() == [1, 2]


@pytest.mark.parametrize(
    "model",
    [CostModel.euclidean(), CostModel.weighted_metric([2.0, 1.0, 0.5], wrap=[False, True, False])],
)
def test_bulk_radius_matches_per_node_queries(model):
    pts = np.random.default_rng(8).random((400, 3))
    plain = NeighborIndex(pts, model)
    bulk = NeighborIndex(pts, model)
    bulk.precompute_radius(0.15)
    for v in range(0, 400, 3):
        a, b = plain.radius(v, 0.15), bulk.radius(v, 0.15)
        np.testing.assert_array_equal(a.idx, b.idx)
        np.testing.assert_array_equal(a.dist, b.dist)
    assert plain.cost_evaluations == bulk.cost_evaluations
    assert plain.near_computations == bulk.near_computations
