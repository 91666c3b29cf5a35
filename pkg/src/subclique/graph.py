"""Immutable graph storage, the degree order, and the counting query oracle."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np


class EdgeListError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph in CSR form.

    ``indptr``/``indices`` hold the sorted neighbor list of every vertex.
    ``m`` counts ordered edges, i.e. the sum of all degrees.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint outside [0, {n})")
        arr = arr[arr[:, 0] != arr[:, 1]]
        both = np.concatenate([arr, arr[:, ::-1]])
        keys = np.unique(both[:, 0] * n + both[:, 1])
        src, dst = np.divmod(keys, n) if n else (keys, keys)
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int64))

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def m(self) -> int:
        return int(self.indices.size)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[v]:ptr[v + 1]] for v in range(self.n)]

    @cached_property
    def adjacency_sets(self) -> list[frozenset[int]]:
        return [frozenset(nb) for nb in self.adjacency]

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted ``u * n + v`` codes of all ordered edges."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        return src * self.n + self.indices

    @cached_property
    def rank(self) -> np.ndarray:
        """Position of each vertex in the degree order (lower degree first, ties by id)."""
        order = np.lexsort((np.arange(self.n), self.degrees))
        rank = np.empty(self.n, dtype=np.int64)
        rank[order] = np.arange(self.n)
        return rank

    def neighbors(self, v: int) -> list[int]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` with ``u < v``."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def sparse(self):
        from scipy.sparse import csr_matrix

        if "sparse" not in self._cache:
            data = np.ones(self.m, dtype=np.int64)
            self._cache["sparse"] = csr_matrix(
                (data, self.indices, self.indptr), shape=(self.n, self.n)
            )
        return self._cache["sparse"]

    def check(self) -> None:
        """Assert the simple-graph invariants."""
        assert int(self.degrees.sum()) == self.m
        assert self.m % 2 == 0
        for v, nb in enumerate(self.adjacency):
            assert v not in nb, f"self-loop at {v}"
            assert all(a < b for a, b in zip(nb, nb[1:])), f"unsorted list at {v}"
            for w in nb:
                assert v in self.adjacency_sets[w], f"asymmetric edge {v}-{w}"


def load_edge_list(stream: TextIO | str, strict: bool = True) -> Graph:
    """Parse ``u v`` lines into a simple graph.

    Blank lines and ``#`` comments are ignored.  An optional ``n <count>``
    header fixes the vertex count so trailing isolated vertices survive.
    Self-loops raise in strict mode and are dropped otherwise; duplicate
    edges always collapse.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    declared = None
    edges = []
    top = -1
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or not parts[1].isdigit():
                raise EdgeListError(f"malformed header at line {lineno}: {raw.strip()!r}")
            declared = int(parts[1])
            continue
        if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
            raise EdgeListError(f"malformed edge at line {lineno}: {raw.strip()!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            if strict:
                raise EdgeListError(f"self-loop at line {lineno}")
            continue
        top = max(top, u, v)
        edges.append((u, v))
    n = top + 1
    if declared is not None:
        if declared < n:
            raise EdgeListError(f"header declares n={declared} but vertex {top} appears")
        n = declared
    return Graph.from_edges(n, edges)


def write_edge_list(graph: Graph, stream: TextIO) -> None:
    stream.write(f"n {graph.n}\n")
    for u, v in graph.edges():
        stream.write(f"{u} {v}\n")


def precedes(graph: Graph, u: int, v: int) -> bool:
    """``u`` comes before ``v`` in the degree order."""
    if u == v:
        raise ValueError("the degree order is strict; u and v must differ")
    du, dv = graph.degrees[u], graph.degrees[v]
    return bool(du < dv or (du == dv and u < v))


def precedes_by(du: int, u: int, dv: int, v: int) -> bool:
    """Degree-order comparison from already-queried degrees."""
    return du < dv or (du == dv and u < v)


@dataclass
class QueryCounts:
    degree: int = 0
    neighbor: int = 0
    pair: int = 0
    uniform_vertex: int = 0

    @property
    def total(self) -> int:
        return self.degree + self.neighbor + self.pair + self.uniform_vertex

    def as_dict(self) -> dict[str, int]:
        return {
            "degree": self.degree,
            "neighbor": self.neighbor,
            "pair": self.pair,
            "uniform": self.uniform_vertex,
        }

    def __add__(self, other: QueryCounts) -> QueryCounts:
        return QueryCounts(
            self.degree + other.degree,
            self.neighbor + other.neighbor,
            self.pair + other.pair,
            self.uniform_vertex + other.uniform_vertex,
        )

    def __sub__(self, other: QueryCounts) -> QueryCounts:
        return QueryCounts(
            self.degree - other.degree,
            self.neighbor - other.neighbor,
            self.pair - other.pair,
            self.uniform_vertex - other.uniform_vertex,
        )

    def copy(self) -> QueryCounts:
        return QueryCounts(self.degree, self.neighbor, self.pair, self.uniform_vertex)


class QueryOracle:
    """Degree / neighbor / pair access to a graph with per-type counters.

    Every answer costs exactly one count of its type; the batch methods
    charge one count per element.  Neighbor indices are 1-based.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self.counts = QueryCounts()
        self._deg = graph.degrees.tolist()
        self._adj = graph.adjacency
        self._sets = graph.adjacency_sets

    @property
    def n(self) -> int:
        return self.graph.n

    def _check(self, v: int) -> None:
        if not 0 <= v < self.graph.n:
            raise IndexError(f"vertex {v} out of range [0, {self.graph.n})")

    def degree(self, v: int) -> int:
        self._check(v)
        self.counts.degree += 1
        return self._deg[v]

    def neighbor(self, v: int, i: int) -> int:
        self._check(v)
        if not 1 <= i <= self._deg[v]:
            raise IndexError(f"neighbor index {i} out of range [1, {self._deg[v]}] for vertex {v}")
        self.counts.neighbor += 1
        return self._adj[v][i - 1]

    def pair(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        self.counts.pair += 1
        return v in self._sets[u]

    def uniform_vertex(self, rng: np.random.Generator) -> int:
        if self.graph.n < 1:
            raise ValueError("graph has no vertices")
        self.counts.uniform_vertex += 1
        return int(rng.integers(self.graph.n))

    # vectorised variants, same accounting

    def degrees(self, vs: np.ndarray) -> np.ndarray:
        self.counts.degree += len(vs)
        return self.graph.degrees[vs]

    def neighbors(self, vs: np.ndarray, idx: np.ndarray) -> np.ndarray:
        deg = self.graph.degrees[vs]
        if np.any((idx < 1) | (idx > deg)):
            raise IndexError("neighbor index out of range")
        self.counts.neighbor += len(vs)
        return self.graph.indices[self.graph.indptr[vs] + idx - 1]

    def pairs(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        self.counts.pair += len(us)
        return self.adjacent(us, vs)

    def uniform_vertices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        self.counts.uniform_vertex += size
        return rng.integers(self.graph.n, size=size)

    def adjacent(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Uncounted adjacency lookup; callers charge queries themselves."""
        keys = self.graph.edge_keys
        q = np.asarray(us, dtype=np.int64) * self.graph.n + np.asarray(vs, dtype=np.int64)
        pos = np.searchsorted(keys, q)
        pos = np.minimum(pos, max(keys.size - 1, 0))
        return keys[pos] == q if keys.size else np.zeros(q.shape, dtype=bool)

    def charge(self, degree: int = 0, neighbor: int = 0, pair: int = 0, uniform_vertex: int = 0) -> None:
        """Book queries answered in bulk (pre-queried neighbourhoods)."""
        self.counts.degree += degree
        self.counts.neighbor += neighbor
        self.counts.pair += pair
        self.counts.uniform_vertex += uniform_vertex

    def reset(self) -> QueryCounts:
        old, self.counts = self.counts, QueryCounts()
        return old
