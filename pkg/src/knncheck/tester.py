"""One-sided sublinear tester for the k-nearest-neighborhood property.

The tester touches the graph only through an OracleSession. It samples a
vertex pool S', filters it by a degree cap into S, samples a witness pool T
with replacement, and rejects as soon as some v in S has degree below k or
some u in T passes the local witness check against some v in S. A graph that
is a k-NN graph is never rejected, for any seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import exact
from .core import GeometricGraph, OracleSession, QueryTally, dist2, dist2_block, dist2_row
from .sampling import rng_from, sample_without_replacement, split_seed

__all__ = [
    "KISSING_NUMBERS",
    "kissing_number",
    "TesterConfig",
    "Evidence",
    "Verdict",
    "sample_sizes",
    "local_witness_check",
    "run_tester",
]

# best known upper bounds on the kissing number for dimensions 1..8
KISSING_NUMBERS = (2, 6, 12, 24, 44, 78, 134, 240)

_LN10 = math.log(10.0)

# rows per vertex block in the pair scan
_SCAN_BLOCK = 256


def kissing_number(delta: int) -> int:
    """Kissing number psi_delta used to size the witness sample T.

    Dimensions above 8 fall back to ceil(2^(0.401 * delta * 1.2)), a sizing
    heuristic with slack for the asymptotic correction term. The value only
    affects sample sizes, never the one-sidedness of the tester.
    """
    if delta < 1:
        raise ValueError("dimension must be at least 1")
    if delta <= len(KISSING_NUMBERS):
        return KISSING_NUMBERS[delta - 1]
    return math.ceil(2.0 ** (0.401 * delta * 1.2))


@dataclass(frozen=True)
class TesterConfig:
    """Run parameters for the tester.

    Theory mode sizes samples as |S'| = 100k*sqrt(n)/eps and
    |T| = ln(10)*k*psi_delta*sqrt(n). Experiment mode uses
    |S'| = c1*8k*sqrt(n) and |T| = c2*k*ln(10)*sqrt(n) and ignores the
    theory constants; theory mode ignores c1/c2.
    """

    k: int
    epsilon: float
    delta: int
    mode: str = "theory"
    c1: float | None = None
    c2: float | None = None
    seed: int = 0
    degree_cap_override: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.delta < 1:
            raise ValueError("delta must be at least 1")
        if self.mode not in ("theory", "experiment"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "experiment":
            if self.c1 is None or self.c2 is None or self.c1 <= 0 or self.c2 <= 0:
                raise ValueError("experiment mode needs positive c1 and c2")
        if self.degree_cap_override is not None and self.degree_cap_override < 1:
            raise ValueError("degree cap override must be positive")


@dataclass(frozen=True)
class Evidence:
    """Rejection evidence: the incomplete vertex and, for witness rejections, the witness."""

    vertex: int
    witness: int | None
    reason: str  # "witness" or "low-degree"


@dataclass(frozen=True)
class Verdict:
    decision: str  # "accept" or "reject"
    evidence: Evidence | None
    s_prime_size: int
    s_size: int
    t_size: int
    queries: QueryTally
    elapsed: float

    def to_json_dict(self) -> dict:
        """JSON-ready form. Excludes elapsed so identical runs serialize identically."""
        return {
            "decision": self.decision,
            "evidence": None
            if self.evidence is None
            else {
                "vertex": self.evidence.vertex,
                "witness": self.evidence.witness,
                "reason": self.evidence.reason,
            },
            "sizes": {
                "s_prime": self.s_prime_size,
                "s": self.s_size,
                "t": self.t_size,
            },
            "queries": {
                "neighbor": self.queries.neighbor,
                "degree": self.queries.degree,
                "coord": self.queries.coord,
                "total": self.queries.total,
            },
        }


def sample_sizes(n: int, cfg: TesterConfig) -> tuple[int, int, int]:
    """Realized (|S'|, |T|, degree cap) for a graph of n vertices.

    |S'| is clamped to n; sampling more than the whole vertex set gains
    nothing without replacement.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    root = math.sqrt(n)
    if cfg.mode == "theory":
        s_prime = min(n, math.ceil(100.0 * cfg.k * root / cfg.epsilon))
        t = math.ceil(_LN10 * cfg.k * kissing_number(cfg.delta) * root)
    else:
        s_prime = min(n, math.ceil(cfg.c1 * 8.0 * cfg.k * root))
        t = math.ceil(cfg.c2 * cfg.k * _LN10 * root)
    cap = math.ceil(100.0 * cfg.k / cfg.epsilon)
    if cfg.degree_cap_override is not None:
        cap = cfg.degree_cap_override
    return s_prime, t, cap


def local_witness_check(session: OracleSession, v: int, u: int, k: int) -> bool:
    """Purely local witness test for the pair (v, u).

    Reads v's degree, its neighbors and their coordinates, and u's
    coordinate. Returns True when u is a non-neighbor strictly inside the
    k-th smallest neighbor distance of v, or unconditionally when
    deg(v) < k. Ties at the k-th distance are not flagged: they are
    satisfiable by arbitrary tie-breaking, which keeps the check one-sided.
    """
    v = session.graph.check_vertex(v)
    u = session.graph.check_vertex(u)
    if u == v:
        raise ValueError("witness check is undefined for u == v")
    deg = session.degree(v)
    if deg < k:
        return True
    nbrs = session.neighbors_all(v)
    vc = session.coord(v)
    nd = dist2_row(vc, session.coords_many(nbrs))
    rk = np.partition(nd, k - 1)[k - 1]
    du = dist2(vc, session.coord(u))
    if np.any(nbrs == u):
        return False
    return bool(du < rk)


def run_tester(session: OracleSession, cfg: TesterConfig) -> Verdict:
    """Run the tester once; deterministic in (graph, cfg, seed) including tallies.

    Rejects on the first v in S with deg(v) < k, or the first pair (v, u) in
    S x T order passing the local witness check; accepts otherwise. Rejection
    evidence is re-verified against ground truth under assertions.
    """
    g = session.graph
    n = g.n
    if n < 2 or cfg.k >= n:
        raise ValueError(f"tester needs 1 <= k < n, got k={cfg.k}, n={n}")
    if cfg.delta != g.delta:
        raise ValueError(f"config dimension {cfg.delta} does not match graph dimension {g.delta}")
    start = time.perf_counter()

    s_prime_size, t_size, cap = sample_sizes(n, cfg)
    seq_s, seq_t = split_seed(cfg.seed, 2)
    s_prime = sample_without_replacement(n, s_prime_size, rng_from(seq_s))
    t_draws = rng_from(seq_t).integers(0, n, size=t_size)

    degs = session.degrees(s_prime)
    keep = degs <= cap
    s_vertices = s_prime[keep]
    s_degs = degs[keep]

    event = _find_event(g, s_vertices, s_degs, t_draws, cfg.k)
    _charge_scan_queries(session, s_vertices, t_draws, event)

    if event is None:
        decision, evidence = "accept", None
    else:
        kind, v_idx, t_idx = event
        vertex = int(s_vertices[v_idx])
        witness = None if t_idx is None else int(t_draws[t_idx])
        evidence = Evidence(vertex, witness, kind)
        decision = "reject"
        assert _evidence_confirmed(g, evidence, cfg.k), evidence

    return Verdict(
        decision=decision,
        evidence=evidence,
        s_prime_size=int(s_prime.size),
        s_size=int(s_vertices.size),
        t_size=int(t_draws.size),
        queries=session.query_count,
        elapsed=time.perf_counter() - start,
    )


def _find_event(
    g: GeometricGraph,
    s_vertices: np.ndarray,
    s_degs: np.ndarray,
    t_draws: np.ndarray,
    k: int,
):
    """First rejection event in S-major scan order, or None.

    Returns ("low-degree", v_index, None) or ("witness", v_index, t_index).
    Vectorized over distinct T values; equivalent to the literal nested loop
    because the witness predicate for (v, u) depends only on u's value.
    """
    low = np.flatnonzero(s_degs < k)
    first_low = int(low[0]) if low.size else None
    limit = first_low if first_low is not None else s_vertices.size

    if limit > 0 and t_draws.size > 0:
        u_vals = np.unique(t_draws)
        u_coords = g.coords[u_vals]
        for lo in range(0, limit, _SCAN_BLOCK):
            hi = min(limit, lo + _SCAN_BLOCK)
            block = s_vertices[lo:hi]
            rk = np.empty(hi - lo, dtype=np.float64)
            for i, v in enumerate(block):
                nd = dist2_row(g.coords[v], g.coords[g.adjacency[v]])
                rk[i] = np.partition(nd, k - 1)[k - 1]
            mask = dist2_block(g.coords[block], u_coords) < rk[:, None]
            for i, v in enumerate(block):
                # the guard requires u != v and u not in N(v)
                targets = np.append(g.adjacency[v], v)
                pos = np.searchsorted(u_vals, targets)
                inside = pos < u_vals.size
                pos = pos[inside]
                mask[i, pos[u_vals[pos] == targets[inside]]] = False
            hits = np.flatnonzero(mask.any(axis=1))
            if hits.size:
                row = int(hits[0])
                wit_vals = u_vals[mask[row]]
                t_idx = int(np.flatnonzero(np.isin(t_draws, wit_vals))[0])
                return ("witness", lo + row, t_idx)

    if first_low is not None:
        return ("low-degree", first_low, None)
    return None


def _charge_scan_queries(session, s_vertices, t_draws, event) -> None:
    """Replay the exact query trace of the sequential scan for accounting.

    The per-kind tallies depend only on the set of distinct reads, so charging
    in bulk reproduces the sequential counts.
    """
    if event is None:
        v_stop, charge_stop_vertex, t_charged = s_vertices.size, False, s_vertices.size > 0
        t_prefix = None
    else:
        kind, v_idx, t_idx = event
        v_stop = v_idx
        charge_stop_vertex = kind == "witness"
        t_charged = v_idx > 0
        t_prefix = None if t_idx is None else t_idx + 1

    upto = v_stop + 1 if charge_stop_vertex else v_stop
    for v in s_vertices[:upto]:
        nbrs = session.neighbors_all(int(v))
        session.coords_many(np.append(np.int64(v), nbrs))
    if t_charged:
        session.coords_many(t_draws)
    elif charge_stop_vertex and t_prefix is not None:
        session.coords_many(t_draws[:t_prefix])


def _evidence_confirmed(g: GeometricGraph, ev: Evidence, k: int) -> bool:
    """Ground-truth confirmation of rejection evidence.

    Low-degree evidence means deg(v) < k. A witness pair (v, u) certifies
    that v is incomplete: u is a non-neighbor strictly inside the k-th
    neighbor distance, which forces a missing true k-nearest neighbor.
    """
    if ev.reason == "low-degree":
        return g.degree(ev.vertex) < k
    u = ev.witness
    if u is None or u == ev.vertex or np.any(g.adjacency[ev.vertex] == u):
        return False
    return exact.witnesses_of(g, ev.vertex, k).incomplete
