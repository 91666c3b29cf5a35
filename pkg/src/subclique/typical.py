"""Sampling a degrees-typical multiset T together with its edge sampler D(T)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, QueryOracle
from .params import Params
from .samplers import EdgeSampler, VertexMultiset


@dataclass
class TypicalSet:
    multiset: VertexMultiset
    t: int
    m_of_T: int
    sampler: EdgeSampler
    attempts: int
    is_full: bool

    def d_T(self, graph: Graph) -> np.ndarray:
        """Neighbors in T of every vertex, counted with multiplicity."""
        if self.is_full:
            return graph.degrees.copy()
        mult = self.multiset.multiplicity(graph.n)
        return graph.sparse() @ mult


def sample_degrees_typical(
    oracle: QueryOracle, params: Params, rng: np.random.Generator
) -> TypicalSet | None:
    """Draw up to ``params.t_attempts`` uniform multisets of size t and keep the
    first whose incident-edge total satisfies ``m(T) <= (t/n) * 4 * mbar``.

    When ``t >= n`` the whole vertex set is used (once; a retry would see
    the same set).  Returns ``None`` when every attempt exceeds the bound.
    """
    n, t = params.n, params.t
    bound = 4 * params.mbar * t / n
    if t >= n:
        ms = VertexMultiset.query(oracle, np.arange(n))
        if ms.m_of > 4 * params.mbar:
            return None
        return TypicalSet(ms, n, ms.m_of, EdgeSampler(ms), 1, True)
    for attempt in range(1, params.t_attempts + 1):
        members = oracle.uniform_vertices(rng, t)
        ms = VertexMultiset.query(oracle, members)
        if ms.m_of <= bound:
            return TypicalSet(ms, t, ms.m_of, EdgeSampler(ms), attempt, False)
    return None


def verify_degrees_typical(graph: Graph, typical: TypicalSet, params: Params) -> bool:
    """Full-access check of the degrees-typical condition (not query-budgeted)."""
    n, t = graph.n, typical.t
    if typical.m_of_T > (t / n) * 4 * params.mbar:
        return False
    deg = graph.degrees
    high = deg > params.theta
    if not high.any():
        return True
    expected = (t / n) * deg[high]
    dev = np.abs(typical.d_T(graph)[high] - expected)
    return bool(np.all(dev <= (params.eps_bar / params.k) * expected + 1e-9))
