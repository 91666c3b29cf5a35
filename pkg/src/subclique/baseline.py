"""Exact clique counting, brute-force cross-checks, and instance generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .graph import Graph


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CliqueCensus:
    k: int
    total: int
    per_vertex: np.ndarray

    def c(self, u: int) -> int:
        return int(self.per_vertex[u])


def _out_sets(graph: Graph) -> list[frozenset[int]]:
    rank = graph.rank.tolist()
    return [
        frozenset(w for w in nb if rank[w] > rank[v])
        for v, nb in enumerate(graph.adjacency)
    ]


def count_cliques_exact(graph: Graph, k: int, node_budget: int = 50_000_000) -> CliqueCensus:
    """Count k-cliques by orienting every edge along the degree order.

    Each clique is found once, from its first vertex, by intersecting
    out-neighborhoods.  Out-degrees are at most sqrt(m), which is what
    keeps this fast on sparse inputs.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    out = _out_sets(graph)
    per = [0] * graph.n
    total = 0
    nodes = 0
    stack: list[int] = []

    def extend(cand: frozenset[int]) -> None:
        nonlocal total, nodes
        nodes += 1
        if nodes > node_budget:
            raise EnumerationBudgetExceeded(f"more than {node_budget} search nodes")
        if len(stack) == k - 1:
            c = len(cand)
            if c:
                total += c
                for x in stack:
                    per[x] += c
                for w in cand:
                    per[w] += 1
            return
        for w in cand:
            nxt = cand & out[w]
            if len(nxt) >= k - 1 - len(stack):
                stack.append(w)
                extend(nxt)
                stack.pop()

    for v in range(graph.n):
        if len(out[v]) >= k - 1:
            stack.append(v)
            extend(out[v])
            stack.pop()
    return CliqueCensus(k, total, np.array(per, dtype=np.int64))


def iter_cliques(graph: Graph, k: int) -> Iterator[tuple[int, ...]]:
    """Yield every k-clique once, vertices listed in degree order."""
    out = _out_sets(graph)
    rank = graph.rank

    def by_rank(vs):
        return sorted(vs, key=rank.__getitem__)

    def extend(stack, cand):
        if len(stack) == k:
            yield tuple(stack)
            return
        for w in by_rank(cand):
            yield from extend(stack + [w], cand & out[w])

    for v in by_rank(range(graph.n)):
        yield from extend([v], out[v])


def count_cliques_naive(graph: Graph, k: int, max_n: int = 30) -> int:
    """Test every k-subset.  Only for tiny graphs."""
    if graph.n > max_n:
        raise ValueError(f"naive counting refused for n={graph.n} > {max_n}")
    sets = graph.adjacency_sets
    return sum(
        all(b in sets[a] for a, b in combinations(sub, 2))
        for sub in combinations(range(graph.n), k)
    )


def claim_bound(m: int, k: int) -> int:
    """``m * binom(ceil(sqrt(m)), k-2)``, an upper bound on the k-clique count."""
    return m * math.comb(math.isqrt(m - 1) + 1 if m > 0 else 0, k - 2)


def gen_path_plus_clique(n: int, t: int) -> Graph:
    """A path on ``n - t`` vertices next to a disjoint complete graph on ``t``."""
    if t > n:
        raise ValueError(f"clique size t={t} exceeds n={n}")
    if t < 0:
        raise ValueError("clique size must be non-negative")
    p = n - t
    edges = [(i, i + 1) for i in range(p - 1)]
    edges += [(p + a, p + b) for a, b in combinations(range(t), 2)]
    return Graph.from_edges(n, edges)


def gen_gnm(n: int, m_edges: int, seed: int | None = None) -> Graph:
    """Uniform simple graph with exactly ``m_edges`` undirected edges."""
    slots = n * (n - 1) // 2
    if not 0 <= m_edges <= slots:
        raise ValueError(f"cannot place {m_edges} edges on {n} vertices (max {slots})")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    pick = rng.choice(slots, size=m_edges, replace=False)
    return Graph.from_edges(n, zip(iu[pick].tolist(), ju[pick].tolist()))


def gen_complete(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))
