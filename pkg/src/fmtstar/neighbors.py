"""Radius, k-nearest and mutual k-nearest neighbor sets with memoization.

Every set is computed at most once per (node, radius or k) and then served
from the memo table. The index also counts fresh neighbor-set computations
and unique pair-cost evaluations so planners can report them.

Under a non-Euclidean cost the "distance" of an entry is its pair cost, so a
radius query returns the cost ball ``{u : Cost(v, u) < r}``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .costs import CostModel
from .sampling import SampleSet

_REL_PAD = 1e-9


class NeighborError(ValueError):
    pass


@dataclass(frozen=True)
class NeighborSet:
    """Neighbor indices sorted by (distance, index); self excluded."""

    idx: np.ndarray
    dist: np.ndarray
    truncated: bool = False

    def __len__(self):
        return self.idx.shape[0]

    def __contains__(self, u) -> bool:
        return bool(np.any(self.idx == u))


def _sorted_set(idx, dist, truncated=False) -> NeighborSet:
    order = np.lexsort((idx, dist))
    return NeighborSet(idx[order], dist[order], truncated)


class NeighborIndex:
    """kd-tree over a sample set plus the neighbor-set memo table."""

    def __init__(self, points, cost: CostModel | None = None):
        if isinstance(points, SampleSet):
            points = points.points
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] < 1:
            raise NeighborError("need at least one point")
        self.points = pts
        self.N = pts.shape[0]
        self.cost = cost or CostModel.euclidean()
        self._lock = threading.Lock()
        self.memo: dict = {}
        self._knn_members: dict = {}
        self._pair_cache: dict = {}
        self._bulk: dict = {}
        self.near_computations = 0
        self.cost_evaluations = 0
        # quadrature-based costs are expensive: keep every value
        self._cached_costs = self.cost.kind == "field" and getattr(self.cost.field, "segment_integrals", None) is None
        if self.cost.kind == "weighted":
            w = self.cost.weights
            wrap = self.cost.wrap
            emb = pts * w
            emb = np.where(wrap, np.mod(emb, w), emb)
            box = np.where(wrap, w, 3.0 * w)
            self._emb = emb
            self.tree = cKDTree(emb, boxsize=box) if wrap.any() else cKDTree(emb)
        else:
            self._emb = pts
            self.tree = cKDTree(pts)

    # -- distances

    def distances(self, v: int, idx) -> np.ndarray:
        """Pair costs from node ``v`` to nodes ``idx`` (not counted)."""
        idx = np.asarray(idx, dtype=np.intp)
        if self._cached_costs:
            return self._field_costs(v, idx)
        return self.cost.pair_costs(self.points[v], self.points[idx])

    def _field_costs(self, v: int, idx: np.ndarray) -> np.ndarray:
        out = np.empty(idx.shape[0])
        cache = self._pair_cache
        N = self.N
        keys = [min(v, u) * N + max(v, u) for u in idx.tolist()]
        missing = []
        for i, key in enumerate(keys):
            val = cache.get(key)
            if val is None:
                missing.append(i)
            else:
                out[i] = val
        if missing:
            m = np.asarray(missing)
            vals = self.cost.pair_costs(self.points[v], self.points[idx[m]])
            out[m] = vals
            for i, val in zip(missing, vals.tolist()):
                cache[keys[i]] = val
            self.cost_evaluations += len(missing)
        return out

    # -- radius queries

    def _reach(self, r: float) -> float:
        # a weighted metric is searched in its scaled embedding, where the
        # tree distance is the cost itself
        if self.cost.kind == "weighted":
            return r * (1 + _REL_PAD)
        return self.cost.euclidean_reach(r) * (1 + _REL_PAD)

    def precompute_radius(self, r: float) -> None:
        """Find all pairs for radius ``r`` in one tree pass (metric costs only).

        Later :meth:`radius` calls slice these arrays instead of querying the
        tree per node. Memo entries and counters are still created lazily,
        so the reported counts match the per-node path.
        """
        if not self.cost.is_metric or r <= 0 or r in self._bulk:
            return
        reach = self._reach(r)
        pairs = self.tree.query_pairs(reach, output_type="ndarray")
        a = np.concatenate([pairs[:, 0], pairs[:, 1]]).astype(np.intp)
        b = np.concatenate([pairs[:, 1], pairs[:, 0]]).astype(np.intp)
        d = self.cost.segment_costs(self.points[a], self.points[b])
        order = np.lexsort((b, d, a))
        a, b, d = a[order], b[order], d[order]
        cand_ptr = np.searchsorted(a, np.arange(self.N + 1))
        self._bulk[r] = (cand_ptr, b, d, np.zeros(self.N, dtype=bool))

    def _bulk_radius(self, v: int, r: float) -> NeighborSet:
        ptr, b, d, queried = self._bulk[r]
        cand = b[ptr[v] : ptr[v + 1]]
        dist = d[ptr[v] : ptr[v + 1]]
        self.cost_evaluations += int(np.count_nonzero(~queried[cand]))
        queried[v] = True
        keep = dist < r
        return NeighborSet(cand[keep], dist[keep])

    def radius(self, v: int, r: float) -> NeighborSet:
        key = (v, "r", r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        with self._lock:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
            if r <= 0:
                raise NeighborError("radius must be positive")
            if r in self._bulk:
                ns = self._bulk_radius(v, r)
                self.near_computations += 1
                self.memo[key] = ns
                return ns
            memo = self.memo
            reach = self._reach(r)
            cand = np.asarray(self.tree.query_ball_point(self._emb[v] if self.cost.is_metric else self.points[v], reach), dtype=np.intp)
            cand = cand[cand != v]
            if self._cached_costs:
                d = self._field_costs(v, cand)
            else:
                d = self.cost.pair_costs(self.points[v], self.points[cand])
                # candidate sets are symmetric, so Cost(v, u) was already
                # evaluated exactly when u's own set under this radius exists
                self.cost_evaluations += sum(1 for u in cand.tolist() if (u, "r", r) not in memo)
            keep = d < r
            ns = _sorted_set(cand[keep], d[keep])
            self.near_computations += 1
            self.memo[key] = ns
            return ns

    # -- k-nearest queries

    def knn(self, v: int, k: int) -> NeighborSet:
        key = (v, "k", k)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        with self._lock:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
            ns = self._fresh_knn(v, k)
            members = np.sort(ns.idx)
            new = 0
            for u in ns.idx.tolist():
                other = self._knn_members.get((u, k))
                if other is None:
                    new += 1
                else:
                    j = np.searchsorted(other, v)
                    if j >= other.shape[0] or other[j] != v:
                        new += 1
            self.cost_evaluations += new
            self.near_computations += 1
            self._knn_members[(v, k)] = members
            self.memo[key] = ns
            return ns

    def _fresh_knn(self, v: int, k: int) -> NeighborSet:
        if self.cost.kind == "field":
            raise NeighborError("k-nearest queries need a metric cost")
        if k < 1:
            raise NeighborError("k must be positive")
        others = self.N - 1
        truncated = k > others
        k_eff = min(k, others)
        if k_eff == 0:
            return NeighborSet(np.zeros(0, dtype=np.intp), np.zeros(0), truncated)
        m = min(k_eff + 2, self.N)
        _, cand = self.tree.query(self._emb[v], k=m)
        cand = np.atleast_1d(np.asarray(cand, dtype=np.intp))
        cand = cand[(cand != v) & (cand < self.N)]
        d = self.cost.pair_costs(self.points[v], self.points[cand])
        ns = _sorted_set(cand, d)
        kth = ns.dist[k_eff - 1]
        if m < self.N and ns.dist[-1] <= kth * (1 + _REL_PAD) + 1e-15:
            # a distance tie may straddle the query boundary: widen
            cand = np.asarray(self.tree.query_ball_point(self._emb[v], kth * (1 + 2 * _REL_PAD) + 1e-15), dtype=np.intp)
            cand = cand[cand != v]
            d = self.cost.pair_costs(self.points[v], self.points[cand])
            ns = _sorted_set(cand, d)
        return NeighborSet(ns.idx[:k_eff], ns.dist[:k_eff], truncated)

    def in_knn(self, u: int, v: int, k: int) -> bool:
        """Whether ``v`` is among the ``k`` nearest neighbors of ``u``."""
        self.knn(u, k)
        members = self._knn_members[(u, k)]
        j = np.searchsorted(members, v)
        return bool(j < members.shape[0] and members[j] == v)

    def mutual_knn(self, v: int, k: int) -> NeighborSet:
        key = (v, "m", k)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        base = self.knn(v, k)
        keep = np.array([self.in_knn(u, v, k) for u in base.idx.tolist()], dtype=bool)
        ns = NeighborSet(base.idx[keep], base.dist[keep], base.truncated)
        with self._lock:
            self.memo.setdefault(key, ns)
        return self.memo[key]


def build_index(samples, cost: CostModel | None = None) -> NeighborIndex:
    return NeighborIndex(samples, cost)


def radius_neighbors(index: NeighborIndex, v: int, r: float) -> NeighborSet:
    return index.radius(v, r)


def knn_neighbors(index: NeighborIndex, v: int, k: int) -> NeighborSet:
    return index.knn(v, k)


def mutual_knn_neighbors(index: NeighborIndex, v: int, k: int) -> NeighborSet:
    return index.mutual_knn(v, k)
