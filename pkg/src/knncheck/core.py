"""Geometric graph data model, squared-distance primitives and the query-counting oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeometricGraph",
    "OracleSession",
    "EdgeBudget",
    "QueryTally",
    "dist2",
    "dist2_row",
    "dist2_block",
]


def dist2(p, q) -> float:
    """Squared Euclidean distance between two points of equal dimension.

    All distance comparisons in this package are made on squared distances in
    binary64 with exact comparison, which preserves the strict-inequality
    ordering of true Euclidean distances. The accumulation order is fixed
    (dimension 0 first) so that scalar, row and block computations agree
    bit for bit.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.ndim != 1 or p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    total = 0.0
    for j in range(p.shape[0]):
        d = float(p[j]) - float(q[j])
        total += d * d
    return total


def dist2_row(p: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Squared distances from point ``p`` to every row of ``pts``.

    Uses the same per-dimension accumulation order as :func:`dist2`.
    """
    p = np.asarray(p, dtype=np.float64)
    pts = np.asarray(pts, dtype=np.float64)
    acc = np.zeros(pts.shape[0], dtype=np.float64)
    for j in range(pts.shape[1]):
        d = pts[:, j] - p[j]
        acc += d * d
    return acc


def dist2_block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distances between rows of ``a`` and rows of ``b``, shape (len(a), len(b)).

    Bit-identical to dist2/dist2_row: per-dimension accumulation in dimension
    order, one IEEE add per dimension (x + 0.0 == x for every non-negative x,
    so seeding the accumulator with the first square changes nothing).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    acc = None
    buf = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
    for j in range(a.shape[1]):
        aj = np.ascontiguousarray(a[:, j])
        bj = np.ascontiguousarray(b[:, j])
        np.subtract(aj[:, None], bj[None, :], out=buf)
        np.multiply(buf, buf, out=buf)
        if acc is None:
            acc, buf = buf, np.empty_like(buf) if a.shape[1] > 1 else buf
        else:
            acc += buf
    return acc


@dataclass(frozen=True, eq=False)
class GeometricGraph:
    """Immutable directed geometric graph.

    ``coords`` holds one row of ``delta`` binary64 reals per vertex and
    ``adjacency`` one ordered out-neighbor id array per vertex. Vertices are
    identified by position; coincident coordinates are legal. Adjacency order
    is the storage order of the source and carries no distance meaning.
    """

    coords: np.ndarray
    adjacency: tuple[np.ndarray, ...]
    k_hint: int | None = None

    def __post_init__(self):
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise ValueError("coords must be 2-d with at least one column")
        if coords.shape[0] < 1:
            raise ValueError("graph needs at least one vertex")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite")
        n = coords.shape[0]
        if len(self.adjacency) != n:
            raise ValueError(f"adjacency has {len(self.adjacency)} rows, expected {n}")
        rows = []
        for v, row in enumerate(self.adjacency):
            a = np.asarray(row, dtype=np.int64)
            if a.ndim != 1:
                raise ValueError(f"vertex {v}: adjacency row must be 1-d")
            if a.size:
                if a.min() < 0 or a.max() >= n:
                    raise ValueError(f"vertex {v}: neighbor id out of range [0, {n})")
                if np.any(a == v):
                    raise ValueError(f"vertex {v}: self-loop")
                if np.unique(a).size != a.size:
                    raise ValueError(f"vertex {v}: duplicate neighbor")
            a.setflags(write=False)
            rows.append(a)
        if self.k_hint is not None and self.k_hint < 1:
            raise ValueError("k_hint must be positive when given")
        coords.setflags(write=False)
        degrees = np.array([a.size for a in rows], dtype=np.int64)
        degrees.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "adjacency", tuple(rows))
        object.__setattr__(self, "_degrees", degrees)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def delta(self) -> int:
        return self.coords.shape[1]

    @property
    def num_edges(self) -> int:
        return int(self._degrees.sum())

    @property
    def degrees(self) -> np.ndarray:
        """Out-degree of every vertex, read-only."""
        return self._degrees

    def check_vertex(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise ValueError(f"vertex id {v} out of range [0, {self.n})")
        return v

    def degree(self, v: int) -> int:
        return int(self._degrees[self.check_vertex(v)])

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[self.check_vertex(v)]

    def coord(self, v: int) -> np.ndarray:
        return self.coords[self.check_vertex(v)]

    def equals(self, other: "GeometricGraph") -> bool:
        """Bit-exact structural equality (coordinates, adjacency order, k_hint)."""
        if self.n != other.n or self.delta != other.delta or self.k_hint != other.k_hint:
            return False
        if not np.array_equal(
            self.coords.view(np.uint64), other.coords.view(np.uint64)
        ):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.adjacency, other.adjacency))


@dataclass(frozen=True)
class QueryTally:
    """Distinct oracle reads split by kind."""

    neighbor: int = 0
    degree: int = 0
    coord: int = 0

    @property
    def total(self) -> int:
        return self.neighbor + self.degree + self.coord


@dataclass(frozen=True)
class EdgeBudget:
    """Average-degree bound d used as the denominator of the epsilon-distance."""

    d: float
    source: str  # "provided" or "computed"

    def __post_init__(self):
        if self.source not in ("provided", "computed"):
            raise ValueError(f"unknown budget source {self.source!r}")
        if not (np.isfinite(self.d) and self.d > 0):
            raise ValueError("edge budget d must be finite and positive")

    @classmethod
    def provided(cls, d: float) -> "EdgeBudget":
        return cls(float(d), "provided")

    @classmethod
    def computed(cls, graph: GeometricGraph) -> "EdgeBudget":
        """Default budget |E|/n. Raises for edgeless graphs; supply d explicitly there."""
        return cls(graph.num_edges / graph.n, "computed")


class OracleSession:
    """Query-counting access to a graph through neighbor, degree and coordinate reads.

    Repeat queries are memoized and free: a (kind, vertex, index) triple is
    charged at most once per session. The graph itself is shared and
    immutable; each session is owned by one logical task.
    """

    def __init__(self, graph: GeometricGraph):
        self.graph = graph
        n = graph.n
        self._deg_seen = np.zeros(n, dtype=bool)
        self._coord_seen = np.zeros(n, dtype=bool)
        self._nbr_all = np.zeros(n, dtype=bool)  # slots 1..deg(v) all charged
        self._nbr_slots: dict[int, set[int]] = {}
        self._n_neighbor = 0
        self._n_degree = 0
        self._n_coord = 0

    @property
    def query_count(self) -> QueryTally:
        return QueryTally(self._n_neighbor, self._n_degree, self._n_coord)

    # single-item oracle functions

    def degree(self, v: int) -> int:
        v = self.graph.check_vertex(v)
        if not self._deg_seen[v]:
            self._deg_seen[v] = True
            self._n_degree += 1
        return int(self.graph._degrees[v])

    def neighbor(self, v: int, i: int) -> int | None:
        """The i-th out-neighbor of v (1-based), or None when deg(v) < i."""
        v = self.graph.check_vertex(v)
        i = int(i)
        if not 1 <= i <= self.graph.n:
            raise ValueError(f"neighbor index {i} out of range [1, {self.graph.n}]")
        self._charge_neighbor(v, i)
        row = self.graph.adjacency[v]
        if i <= row.size:
            return int(row[i - 1])
        return None

    def coord(self, v: int) -> np.ndarray:
        v = self.graph.check_vertex(v)
        if not self._coord_seen[v]:
            self._coord_seen[v] = True
            self._n_coord += 1
        return self.graph.coords[v]

    # bulk variants with identical accounting

    def degrees(self, vs) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        if vs.size and (vs.min() < 0 or vs.max() >= self.graph.n):
            raise ValueError("vertex id out of range")
        fresh = np.unique(vs[~self._deg_seen[vs]])
        self._deg_seen[fresh] = True
        self._n_degree += fresh.size
        return self.graph._degrees[vs]

    def neighbors_all(self, v: int) -> np.ndarray:
        """All out-neighbors of v in storage order, charging slots 1..deg(v)."""
        deg = self.degree(v)
        if not self._nbr_all[v]:
            already = self._nbr_slots.get(v)
            charged = 0
            if already is not None:
                charged = sum(1 for i in already if i <= deg)
                leftover = {i for i in already if i > deg}
                if leftover:
                    self._nbr_slots[v] = leftover
                else:
                    del self._nbr_slots[v]
            self._n_neighbor += deg - charged
            self._nbr_all[v] = True
        return self.graph.adjacency[v]

    def coords_many(self, vs) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        if vs.size and (vs.min() < 0 or vs.max() >= self.graph.n):
            raise ValueError("vertex id out of range")
        fresh = np.unique(vs[~self._coord_seen[vs]])
        self._coord_seen[fresh] = True
        self._n_coord += fresh.size
        return self.graph.coords[vs]

    def _charge_neighbor(self, v: int, i: int) -> None:
        deg = int(self.graph._degrees[v])
        if self._nbr_all[v] and i <= deg:
            return
        slots = self._nbr_slots.setdefault(v, set())
        if i not in slots:
            slots.add(i)
            self._n_neighbor += 1
