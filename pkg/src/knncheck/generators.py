"""Constructive instance generators.

Line gadgets and the two gadget distributions (one always a k-NN graph, one
far from the property), the coincident-split construction attaining the
k * psi_delta witness-sharing bound, graded edge corruption of exact k-NN
graphs, and the stale-adjacency / recomputed pair used to probe the
dimension lower bound. Every generator is deterministic in its parameters
and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GeometricGraph
from .exact import build_exact_knn_graph, knn_adjacency_row
from .sampling import rng_from, sample_without_replacement, split_seed

__all__ = [
    "GadgetLayout",
    "line_gadget",
    "sample_d1",
    "sample_d2",
    "draw_relocation_pairs",
    "tight_witness_construction",
    "corrupt_edges",
    "dimension_lb_instances",
]


@dataclass(frozen=True)
class GadgetLayout:
    """Placement plan for a gadget graph.

    ``positions`` are the pre-relocation base coordinates 3*k'*i, strictly
    increasing. ``duplicated_pairs`` lists (source, target) gadget indices;
    each source is moved onto its target's coordinates, so the pair ends up
    coincident.
    """

    k_prime: int
    gadget_count: int
    positions: np.ndarray
    duplicated_pairs: tuple[tuple[int, int], ...] = ()

    def effective_base(self, gadget: int) -> float:
        for src, dst in self.duplicated_pairs:
            if gadget == src:
                return float(self.positions[dst])
        return float(self.positions[gadget])


def line_gadget(x: float, k: int, delta: int = 1) -> GeometricGraph:
    """Complete digraph on k+1 unit-spaced collinear points starting at x.

    A line gadget is itself a k-NN graph. With delta > 1 the line is embedded
    on the first axis and padded with zeros.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    size = k + 1
    coords = np.zeros((size, delta), dtype=np.float64)
    coords[:, 0] = x + np.arange(size, dtype=np.float64)
    adjacency = tuple(
        np.array([u for u in range(size) if u != v], dtype=np.int64) for v in range(size)
    )
    return GeometricGraph(coords, adjacency, k_hint=k)


def _gadget_graph(n: int, k: int, layout: GadgetLayout, perm: np.ndarray) -> GeometricGraph:
    k1 = layout.k_prime
    coords = np.zeros((n, 1), dtype=np.float64)
    adjacency: list[np.ndarray | None] = [None] * n
    for gadget in range(layout.gadget_count):
        base = layout.effective_base(gadget)
        slots = range(gadget * k1, (gadget + 1) * k1)
        for offset, slot in enumerate(slots):
            vid = int(perm[slot])
            coords[vid, 0] = base + offset
            adjacency[vid] = perm[[s for s in slots if s != slot]].astype(np.int64)
    return GeometricGraph(coords, tuple(adjacency), k_hint=k)


def _base_positions(gadget_count: int, k1: int) -> np.ndarray:
    # gap between consecutive gadgets is 3k' - k > k, so nearest neighbors stay in-gadget
    return 3.0 * k1 * np.arange(gadget_count, dtype=np.float64)


def sample_d1(n: int, k: int, seed: int) -> GeometricGraph:
    """Uniformly labelled union of n/(k+1) line gadgets; always a k-NN graph."""
    k1 = k + 1
    if n % k1:
        raise ValueError(f"n={n} must be a multiple of k+1={k1}")
    m = n // k1
    layout = GadgetLayout(k1, m, _base_positions(m, k1))
    perm = rng_from(seed).permutation(n)
    return _gadget_graph(n, k, layout, perm)


def draw_relocation_pairs(
    gadget_count: int, pair_count: int, rng: np.random.Generator
) -> tuple[tuple[int, int], ...]:
    """Disjoint (source, target) gadget pairs drawn without replacement."""
    if 2 * pair_count > gadget_count:
        raise ValueError(
            f"cannot relocate {pair_count} of {gadget_count} gadgets onto distinct targets"
        )
    chosen = sample_without_replacement(gadget_count, 2 * pair_count, rng)
    return tuple((int(chosen[i]), int(chosen[i + pair_count])) for i in range(pair_count))


def sample_d2(n: int, k: int, epsilon: float, seed: int) -> GeometricGraph:
    """Gadget graph with ceil(eps*n/k') gadgets relocated onto others' coordinates.

    Relocated gadgets keep their internal edges; every vertex of a coincident
    pair ends up with missing true nearest neighbors, which puts the graph
    beyond epsilon-distance epsilon (certified by the ground-truth oracle in
    tests rather than re-derived symbolically).
    """
    k1 = k + 1
    if n % k1:
        raise ValueError(f"n={n} must be a multiple of k+1={k1}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    m = n // k1
    r = math.ceil(epsilon * n / k1)
    seq_pairs, seq_perm = split_seed(seed, 2)
    pairs = draw_relocation_pairs(m, r, rng_from(seq_pairs))
    layout = GadgetLayout(k1, m, _base_positions(m, k1), pairs)
    perm = rng_from(seq_perm).permutation(n)
    return _gadget_graph(n, k, layout, perm)


_PHI = (1.0 + math.sqrt(5.0)) / 2.0


def icosahedron_directions() -> np.ndarray:
    """Twelve unit vectors at the vertices of a regular icosahedron.

    Pairwise chord length is about 1.05, strictly above the circumradius, so
    the center of the sphere is the strict nearest neighbor of every vertex.
    """
    raw = []
    for a in (-1.0, 1.0):
        for b in (-_PHI, _PHI):
            raw.append((0.0, a, b))
            raw.append((a, b, 0.0))
            raw.append((b, 0.0, a))
    return np.array(raw, dtype=np.float64) / math.sqrt(1.0 + _PHI * _PHI)


def tight_witness_construction(delta: int, k: int) -> tuple[GeometricGraph, int]:
    """Point set where k * psi_delta points share the focal vertex as k-nearest neighbor.

    Supported dimensions: 1 (base points at -1 and +1) and 3 (icosahedron
    vertices at radius 1). Each base point is split into k exactly coincident
    copies; the k-th nearest of every copy is then the focal origin. The
    returned graph has empty adjacency, vertex 0 is the focal point.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if delta == 1:
        dirs = np.array([[-1.0], [1.0]], dtype=np.float64)
    elif delta == 3:
        dirs = icosahedron_directions()
    else:
        raise ValueError(f"tight construction supports delta in {{1, 3}}, got {delta}")
    rows = [np.zeros(delta, dtype=np.float64)]
    for d in dirs:
        rows.extend([d] * k)
    coords = np.vstack(rows)
    adjacency = tuple(np.empty(0, dtype=np.int64) for _ in range(coords.shape[0]))
    return GeometricGraph(coords, adjacency, k_hint=k), 0


def corrupt_edges(
    g: GeometricGraph, fraction: float, seed: int, k: int | None = None
) -> GeometricGraph:
    """Replace ceil(fraction*n*k) adjacency slots with random non-neighbors.

    Slots are drawn uniformly without replacement over all (vertex, slot)
    pairs; each replacement target is drawn uniformly outside the vertex's
    current adjacency and itself, so out-degrees and list invariants are
    preserved. fraction=0 returns an identical graph.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    if k is None:
        k = g.k_hint
    if k is None:
        raise ValueError("k not given and graph has no k_hint")
    if int(g.degrees.min()) < k:
        raise ValueError("corrupt_edges expects min out-degree >= k")
    n = g.n
    count = math.ceil(fraction * n * k)
    starts = np.concatenate(([0], np.cumsum(g.degrees)))
    total_slots = int(starts[-1])
    rng = rng_from(seed)
    chosen = sample_without_replacement(total_slots, count, rng)

    adjacency = [row.copy() for row in g.adjacency]
    current = [set(int(u) for u in row) for row in g.adjacency]
    for flat in chosen:
        v = int(np.searchsorted(starts, flat, side="right")) - 1
        slot = int(flat - starts[v])
        if n - 1 <= len(current[v]):
            raise ValueError(f"vertex {v} is adjacent to every other vertex; cannot corrupt")
        old = int(adjacency[v][slot])
        while True:
            cand = int(rng.integers(0, n))
            if cand != v and cand not in current[v]:
                break
        adjacency[v][slot] = cand
        current[v].discard(old)
        current[v].add(cand)
    return GeometricGraph(g.coords, tuple(adjacency), k_hint=g.k_hint)


# scaled radius of each split cluster and the center displacement; eta must be
# small enough that all strict orderings used below survive (asserted in tests
# by ground-truth verification of both outputs)
_LB_SIGMA = 0.125
_LB_ETA = _LB_SIGMA / 32.0


def _rotated_icosahedron() -> np.ndarray:
    """Icosahedron directions rotated so every first coordinate is distinct and
    bounded away from zero, ordered by first coordinate."""
    a, b = 0.74, 1.13
    ry = np.array(
        [
            [math.cos(a), 0.0, math.sin(a)],
            [0.0, 1.0, 0.0],
            [-math.sin(a), 0.0, math.cos(a)],
        ]
    )
    rz = np.array(
        [
            [math.cos(b), -math.sin(b), 0.0],
            [math.sin(b), math.cos(b), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    dirs = icosahedron_directions() @ ry.T @ rz.T
    dirs = dirs[np.argsort(dirs[:, 0])]
    if np.min(np.abs(dirs[:, 0])) <= 2.0 * _LB_ETA / _LB_SIGMA:
        raise AssertionError("rotation leaves a direction too close to the splitting plane")
    if np.unique(dirs[:, 0]).size != dirs.shape[0]:
        raise AssertionError("rotation leaves coincident first coordinates")
    return dirs


def dimension_lb_instances(
    k: int, epsilon: float, c: int, delta: int = 3
) -> tuple[GeometricGraph, GeometricGraph]:
    """Stale/exact instance pair from perturbed coincident-split clusters.

    Builds c clusters of the scaled delta=3 tight construction centered at
    (i, 0, 0), takes their exact k-NN graph, then perturbs the first
    ceil(2*eps*k*c) clusters: the center moves back by eta and a new split
    point appears ahead of it, so half of each perturbed cluster's satellites
    acquire the new point as k-th nearest neighbor.

    The first returned graph keeps the stale adjacency (far from the
    property). The second relocates the new points to (-1, 0, 0) and
    recomputes adjacency for all moved points, which restores the property
    exactly. Both claims are verified by the ground-truth oracle in tests.
    """
    if delta != 3:
        raise ValueError(f"only delta=3 is supported, got {delta}")
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    m = math.ceil(2.0 * epsilon * k * c)
    if not 1 <= m <= c:
        raise ValueError(
            f"need 1 <= ceil(2*eps*k*c) <= c; got {m} perturbed of {c} clusters"
        )
    dirs = _rotated_icosahedron()
    cluster = 12 * k + 1

    rows = []
    for i in range(1, c + 1):
        center = np.array([float(i), 0.0, 0.0])
        rows.append(center)
        for d in dirs:
            rows.extend([center + _LB_SIGMA * d] * k)
    base_coords = np.vstack(rows)
    base = build_exact_knn_graph(base_coords, k)

    n = c * cluster
    far_coords = np.vstack([base_coords, np.zeros((m, 3))])
    center_ids = [i * cluster for i in range(m)]
    split_ids = list(range(n, n + m))
    for i, (cid, sid) in enumerate(zip(center_ids, split_ids)):
        far_coords[cid, 0] -= _LB_ETA
        far_coords[sid] = [float(i + 1) + _LB_ETA, 0.0, 0.0]
    far_adjacency = list(base.adjacency) + [np.empty(0, dtype=np.int64)] * m
    g_far = GeometricGraph(far_coords, tuple(far_adjacency), k_hint=k)

    exact_coords = far_coords.copy()
    for sid in split_ids:
        exact_coords[sid] = [-1.0, 0.0, 0.0]
    exact_adjacency = list(far_adjacency)
    for vid in center_ids + split_ids:
        exact_adjacency[vid] = knn_adjacency_row(exact_coords, vid, k)
    g_exact = GeometricGraph(exact_coords, tuple(exact_adjacency), k_hint=k)
    return g_far, g_exact
