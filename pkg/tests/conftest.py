"""Shared fixtures and brute-force oracles.

The oracles here are written against the graph directly (adjacency sets,
itertools) and never call into the sampler or estimator code, so they can
serve as independent references for those modules.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import strategies as st

from subclique.graph import Graph, QueryOracle
from subclique.params import derive_params
from subclique.samplers import EdgeSampler, VertexMultiset
from subclique.typical import TypicalSet


def before(graph: Graph, a: int, b: int) -> bool:
    da, db = len(graph.adjacency_sets[a]), len(graph.adjacency_sets[b])
    return (da, a) < (db, b)


def brute_tuples(graph: Graph, s_members, k: int) -> Counter:
    """C(S) with multiplicity: every (u, v, w_1..w_{k-2}) built from scratch."""
    adj = graph.adjacency_sets
    mult = Counter(int(x) for x in s_members)
    out: Counter = Counter()
    for u, mu in mult.items():
        for v in adj[u]:
            pool = [w for w in range(graph.n) if w not in (u, v)]
            for ws in permutations(pool, k - 2):
                verts = (u, v, *ws)
                if all(b in adj[a] for a, b in combinations(verts, 2)) and all(
                    before(graph, v, w) for w in ws
                ):
                    out[verts] += mu
    return out


def exact_output_law(graph: Graph, s_members, t_members, theta: float, k: int) -> dict:
    """Probability of every outcome of one sampling attempt, by walking its choice tree.

    Keys are tuples; ``None`` collects the failure mass.
    """
    adj = [sorted(a) for a in graph.adjacency_sets]
    deg = [len(a) for a in adj]
    n = graph.n
    s_mult = Counter(int(x) for x in s_members)
    t_mult = Counter(int(x) for x in t_members)
    m_S = sum(deg[u] * c for u, c in s_mult.items())
    m_T = sum(deg[x] * c for x, c in t_mult.items())
    t = sum(t_mult.values())
    law: Counter = Counter()

    def grow(u, v, ws, p):
        if len(ws) == k - 2:
            verts = (u, v, *ws)
            ok = all(b in graph.adjacency_sets[a] for a, b in combinations(verts, 2))
            ok = ok and all(before(graph, v, w) for w in ws)
            law[verts if ok else None] += p
            return
        if deg[v] <= theta:
            keep = deg[v] / theta
            law[None] += p * (1 - keep)
            for w in adj[v]:
                grow(u, v, ws + [w], p * keep / deg[v])
        else:
            for x, cx in t_mult.items():
                for y in adj[x]:
                    q = p * cx / m_T
                    if deg[y] <= theta:
                        law[None] += q
                        continue
                    acc = m_T / (deg[y] * (t / n) * theta)
                    law[None] += q * (1 - acc)
                    grow(u, v, ws + [y], q * acc)

    for u, cu in s_mult.items():
        for v in adj[u]:
            grow(u, v, [], cu / m_S)
    return dict(law)


def full_typical(oracle: QueryOracle) -> TypicalSet:
    ms = VertexMultiset.query(oracle, np.arange(oracle.graph.n))
    return TypicalSet(ms, oracle.graph.n, ms.m_of, EdgeSampler(ms), 1, True)


def make_params(graph: Graph, k: int, ckbar: float = 1.0, eps: float = 0.5, delta: float = 0.1,
                mbar: float | None = None, **kw):
    return derive_params(graph.n, k, graph.m if mbar is None else mbar, ckbar, eps, delta, **kw)


def book(pages: int) -> Graph:
    """Two adjacent hubs, each page adjacent to both."""
    edges = [(0, 1)] + [(h, 2 + i) for i in range(pages) for h in (0, 1)]
    return Graph.from_edges(pages + 2, edges)


def complete(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def k_cliques_by_subsets(graph: Graph, k: int) -> int:
    adj = graph.adjacency_sets
    return sum(
        all(b in adj[a] for a, b in combinations(sub, 2)) for sub in combinations(range(graph.n), k)
    )


@st.composite
def small_graphs(draw, max_n: int = 12, min_n: int = 1):
    n = draw(st.integers(min_n, max_n))
    slots = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(slots), max_size=len(slots)))
    return Graph.from_edges(n, [e for e, keep in zip(slots, mask) if keep])


@pytest.fixture
def triangle() -> Graph:
    return complete(3)


@pytest.fixture
def k4() -> Graph:
    return complete(4)


# --- acceptance reporting -------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, passed: bool, detail: str) -> bool:
    """Remember one PASS/FAIL line for the end-of-run summary."""
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[criterion])
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
