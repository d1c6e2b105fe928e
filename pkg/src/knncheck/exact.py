"""Exact brute-force k-nearest-neighbor semantics.

Everything here reads the graph directly (never through an OracleSession) and
serves as the ground truth the sublinear tester is validated against. All
routines are O(n^2 * delta) or better, which is fine at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EdgeBudget, GeometricGraph, dist2_block

__all__ = [
    "WitnessSet",
    "DistanceReport",
    "NeighborhoodProfile",
    "num_nearer",
    "k_nearest_set",
    "witnesses_of",
    "knn_adjacency_row",
    "build_exact_knn_graph",
    "epsilon_distance",
    "max_shared_knn",
]

# rows per distance block, sized to keep temporaries around 64 MB
_BLOCK_FLOATS = 8_000_000


def _block_size(n: int) -> int:
    return max(1, min(n, _BLOCK_FLOATS // max(1, n)))


def _self_masked_block(coords: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Squared distances from rows lo..hi to all points, self distances set to inf."""
    d2 = dist2_block(coords[lo:hi], coords)
    d2[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
    return d2


def num_nearer(g: GeometricGraph, v: int, w: int) -> int:
    """Number of vertices u != v strictly nearer to v than w is."""
    v = g.check_vertex(v)
    w = g.check_vertex(w)
    if v == w:
        raise ValueError("num_nearer is undefined for v == w")
    d2 = _self_masked_block(g.coords, v, v + 1)[0]
    return int(np.sum(d2 < d2[w]))


def k_nearest_set(g: GeometricGraph, v: int, k: int) -> set[int]:
    """All vertices u != v with at most k-1 vertices strictly nearer to v.

    Under distance ties the set may exceed k elements.
    """
    v = g.check_vertex(v)
    _check_k(g.n, k)
    d2 = _self_masked_block(g.coords, v, v + 1)[0]
    dk = np.partition(d2, k - 1)[k - 1]
    return set(int(u) for u in np.flatnonzero(d2 <= dk))


@dataclass(frozen=True)
class WitnessSet:
    """Witness evidence for one vertex: k-nearest vertices missing from its adjacency."""

    vertex: int
    witnesses: frozenset[int]
    degree_deficit: int

    @property
    def incomplete(self) -> bool:
        return bool(self.witnesses) or self.degree_deficit > 0


def witnesses_of(g: GeometricGraph, v: int, k: int) -> WitnessSet:
    v = g.check_vertex(v)
    _check_k(g.n, k)
    wit = k_nearest_set(g, v, k) - set(int(u) for u in g.adjacency[v])
    return WitnessSet(v, frozenset(wit), max(0, k - g.degree(v)))


def knn_adjacency_row(coords: np.ndarray, v: int, k: int) -> np.ndarray:
    """The k out-neighbors of v in an exact k-NN graph of ``coords``.

    Sorted by (squared distance, vertex id); ties at the k-th distance are
    broken toward smaller ids.
    """
    coords = np.asarray(coords, dtype=np.float64)
    _check_k(coords.shape[0], k)
    d2 = _self_masked_block(coords, v, v + 1)[0]
    return _select_knn_ids(d2, np.partition(d2, k - 1)[k - 1], k)


def _select_knn_ids(d2: np.ndarray, cutoff: float, k: int) -> np.ndarray:
    cand = np.flatnonzero(d2 <= cutoff)
    order = np.lexsort((cand, d2[cand]))
    return cand[order[:k]].astype(np.int64)


def build_exact_knn_graph(points, k: int) -> GeometricGraph:
    """Exact k-NN graph of a point set; every vertex gets out-degree exactly k."""
    coords = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if coords.ndim != 2:
        raise ValueError("points must be a 2-d coordinate matrix")
    n = coords.shape[0]
    if n <= k:
        raise ValueError(f"need more than k={k} points, got {n}")
    if k < 1:
        raise ValueError("k must be at least 1")
    adjacency = []
    step = _block_size(n)
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        d2 = _self_masked_block(coords, lo, hi)
        cutoffs = np.partition(d2, k - 1, axis=1)[:, k - 1]
        for i in range(hi - lo):
            adjacency.append(_select_knn_ids(d2[i], cutoffs[i], k))
    return GeometricGraph(coords, tuple(adjacency), k_hint=k)


@dataclass(frozen=True)
class DistanceReport:
    """Exact distance of a graph to the k-NN property plus incomplete-vertex census."""

    min_edits: int
    epsilon_distance: float
    incomplete_count: int
    low_degree_incomplete_count: int | None = None


class NeighborhoodProfile:
    """Per-vertex k-th-distance structure of a point set.

    Holds, for every vertex, the ids strictly inside its k-th smallest
    distance and the ids exactly at it. This depends only on coordinates, so
    one profile serves every graph over the same point set (the sweep harness
    reuses it across many corrupted adjacencies).
    """

    def __init__(self, coords: np.ndarray, k: int):
        coords = np.ascontiguousarray(np.asarray(coords, dtype=np.float64))
        _check_k(coords.shape[0], k)
        self.k = k
        self.n = coords.shape[0]
        self._inside: list[frozenset[int]] = []
        self._at: list[frozenset[int]] = []
        step = _block_size(self.n)
        for lo in range(0, self.n, step):
            hi = min(self.n, lo + step)
            d2 = _self_masked_block(coords, lo, hi)
            dks = np.partition(d2, k - 1, axis=1)[:, k - 1]
            for i in range(hi - lo):
                self._inside.append(frozenset(np.flatnonzero(d2[i] < dks[i]).tolist()))
                self._at.append(frozenset(np.flatnonzero(d2[i] == dks[i]).tolist()))

    def vertex_edits(self, v: int, neighbors) -> int:
        """Minimum insertions to give v a valid tie-broken k-nearest set.

        Vertices strictly inside the k-th distance are mandatory; ties at the
        k-th distance fill the remaining slots preferring existing neighbors.
        """
        nbrs = self._as_set(neighbors)
        inside = self._inside[v]
        inside_nbr = len(inside & nbrs)
        at_nbr = len(self._at[v] & nbrs)
        return (len(inside) - inside_nbr) + max(0, self.k - len(inside) - at_nbr)

    def vertex_incomplete(self, v: int, neighbors) -> bool:
        nbrs = self._as_set(neighbors)
        if len(nbrs) < self.k:
            return True
        inside = self._inside[v]
        at = self._at[v]
        return len(inside) + len(at) > len(inside & nbrs) + len(at & nbrs)

    @staticmethod
    def _as_set(neighbors) -> frozenset[int]:
        if isinstance(neighbors, (set, frozenset)):
            return neighbors
        return frozenset(np.asarray(neighbors).tolist())

    def report(
        self,
        g: GeometricGraph,
        budget: EdgeBudget | None = None,
        epsilon: float | None = None,
    ) -> DistanceReport:
        if g.n != self.n:
            raise ValueError("graph does not match the profiled point set")
        if budget is None:
            budget = EdgeBudget.computed(g)
        cap = None if epsilon is None else math.ceil(100.0 * self.k / epsilon)
        min_edits = 0
        incomplete = 0
        low_degree_incomplete = 0
        for v in range(self.n):
            nbrs = frozenset(g.adjacency[v].tolist())
            min_edits += self.vertex_edits(v, nbrs)
            if self.vertex_incomplete(v, nbrs):
                incomplete += 1
                if cap is not None and len(nbrs) <= cap:
                    low_degree_incomplete += 1
        return DistanceReport(
            min_edits=min_edits,
            epsilon_distance=min_edits / (budget.d * self.n),
            incomplete_count=incomplete,
            low_degree_incomplete_count=None if cap is None else low_degree_incomplete,
        )


def epsilon_distance(
    g: GeometricGraph,
    k: int,
    budget: EdgeBudget | None = None,
    epsilon: float | None = None,
) -> DistanceReport:
    """Minimum edge insertions to make ``g`` a k-NN graph, normalized by d*n.

    Only insertions are counted: the property demands edge presence, never
    absence, so deletions cannot reduce the edit count.

    When ``epsilon`` is given, the report also counts incomplete vertices of
    degree at most 100k/epsilon.
    """
    return NeighborhoodProfile(g.coords, k).report(g, budget, epsilon)


def max_shared_knn(points, k: int) -> int:
    """Largest number of points that share one point among their k nearest."""
    coords = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if coords.ndim != 2:
        raise ValueError("points must be a 2-d coordinate matrix")
    n = coords.shape[0]
    if n <= k:
        raise ValueError(f"need more than k={k} points, got {n}")
    counts = np.zeros(n, dtype=np.int64)
    step = _block_size(n)
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        d2 = _self_masked_block(coords, lo, hi)
        dks = np.partition(d2, k - 1, axis=1)[:, k - 1]
        counts += np.sum(d2 <= dks[:, None], axis=0)
    return int(counts.max())


def _check_k(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
