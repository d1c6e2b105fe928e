"""Independent reference implementations used to cross-check the package.

These deliberately avoid the package's vectorized code paths: plain Python
loops, itertools enumeration and per-pair local checks. They are slow and
only run at small sizes.
"""

from __future__ import annotations

import itertools

import numpy as np

from knncheck.core import GeometricGraph, OracleSession, dist2
from knncheck.sampling import rng_from, sample_without_replacement, split_seed
from knncheck.tester import Evidence, TesterConfig, Verdict, local_witness_check, sample_sizes


def exhaustive_min_edits(g: GeometricGraph, k: int) -> int:
    """Minimum insertions over all valid tie-broken k-nearest target sets.

    For each vertex, enumerates every set R with |R| = k that contains all
    strictly nearer vertices and fills up with vertices tied at the k-th
    distance, and takes the cheapest |R minus N(v)|.
    """
    total = 0
    for v in range(g.n):
        dists = sorted(
            (dist2(g.coords[v], g.coords[u]), u) for u in range(g.n) if u != v
        )
        dk = dists[k - 1][0]
        inside = [u for d, u in dists if d < dk]
        ties = [u for d, u in dists if d == dk]
        nbrs = set(int(x) for x in g.adjacency[v])
        need = k - len(inside)
        best = None
        for chosen in itertools.combinations(ties, need):
            cost = sum(1 for u in inside if u not in nbrs) + sum(
                1 for u in chosen if u not in nbrs
            )
            best = cost if best is None else min(best, cost)
        total += best
    return total


def naive_run_tester(session: OracleSession, cfg: TesterConfig) -> Verdict:
    """Literal nested-loop tester over the same samples as run_tester."""
    g = session.graph
    n = g.n
    s_prime_size, t_size, cap = sample_sizes(n, cfg)
    seq_s, seq_t = split_seed(cfg.seed, 2)
    s_prime = sample_without_replacement(n, s_prime_size, rng_from(seq_s))
    t_draws = rng_from(seq_t).integers(0, n, size=t_size)

    s_vertices = [int(v) for v in s_prime if session.degree(int(v)) <= cap]

    decision, evidence = "accept", None
    for v in s_vertices:
        if session.degree(v) < cfg.k:
            decision, evidence = "reject", Evidence(v, None, "low-degree")
            break
        found = False
        for u in t_draws:
            u = int(u)
            if u == v:
                continue
            if local_witness_check(session, v, u, cfg.k):
                decision, evidence = "reject", Evidence(v, u, "witness")
                found = True
                break
        if found:
            break

    return Verdict(
        decision=decision,
        evidence=evidence,
        s_prime_size=len(s_prime),
        s_size=len(s_vertices),
        t_size=len(t_draws),
        queries=session.query_count,
        elapsed=0.0,
    )


def k_reduce(points: np.ndarray, p_idx: int, k: int) -> tuple[list[int], list[int]]:
    """Pruning procedure reducing shared-k-NN counting to the nearest-neighbor case.

    Starts from Q = points having p among their k nearest, then repeatedly
    picks the unresolved point farthest from p and discards the points that
    lie strictly nearer to it than p does. Returns the surviving ids and the
    per-step removal counts.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]

    def d(a, b):
        return dist2(pts[a], pts[b])

    def numnearer(q, w):
        ref = d(q, w)
        return sum(1 for u in range(n) if u != q and d(q, u) < ref)

    q_set = [q for q in range(n) if q != p_idx and numnearer(q, p_idx) <= k - 1]
    removals = []
    while True:
        violating = [
            q
            for q in q_set
            if any(q2 != q and d(q, q2) < d(q, p_idx) for q2 in q_set)
        ]
        if not violating:
            break
        far = max(violating, key=lambda q: (d(q, p_idx), -q))
        doomed = [q2 for q2 in q_set if q2 != far and d(far, q2) < d(far, p_idx)]
        removals.append(len(doomed))
        q_set = [q for q in q_set if q not in doomed]
    return q_set, removals


def random_small_graph(rng: np.random.Generator, k: int) -> GeometricGraph:
    """Small lattice-coordinate graph with random adjacency; ties are common."""
    n = int(rng.integers(k + 2, 13))
    delta = int(rng.integers(1, 3))
    coords = rng.integers(0, 4, size=(n, delta)).astype(np.float64)
    adjacency = []
    for v in range(n):
        deg = int(rng.integers(0, min(n - 1, k + 3)))
        others = [u for u in range(n) if u != v]
        idx = sample_without_replacement(len(others), deg, rng)
        adjacency.append(np.array([others[i] for i in idx], dtype=np.int64))
    return GeometricGraph(coords, tuple(adjacency))
