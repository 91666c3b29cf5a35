"""The main (1 +- eps) estimator for the number of k-cliques, given a guess ckbar."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .baseline import count_cliques_exact, iter_cliques
from .cliques import sample_a_clique, sample_cliques
from .closed_form import (
    assignment,
    clique_table,
    draw_verdicts,
    hit_probability,
    pre_query,
    row_weights,
    verdict_plan,
)
from .graph import Graph, QueryCounts, QueryOracle
from .params import Params
from .popularity import CHUNK, VerdictCache
from .samplers import EdgeSampler, VertexMultiset
from .typical import sample_degrees_typical

ENGINES = ("auto", "closed", "batch", "scalar")


class Streams:
    """Named generators for one run.

    From an integer seed each stream gets its own child sequence, keyed by
    its position in ``NAMES`` and created on first use, so which streams a
    run happens to touch never shifts the others.  A caller-supplied
    Generator is shared by every name: the caller already owns that stream
    and reseeding from it on every call is pure overhead.
    """

    NAMES = ("s_draw", "t_draw", "clique", "popularity")

    def __init__(self, source: int | np.random.Generator | None):
        self._made: dict[str, np.random.Generator] = {}
        if isinstance(source, np.random.Generator):
            self._made = dict.fromkeys(Streams.NAMES, source)
            self._root = None
        else:
            self._root = np.random.SeedSequence(source)

    def __getattr__(self, name: str) -> np.random.Generator:
        if name not in Streams.NAMES:
            raise AttributeError(name)
        if name not in self._made:
            seq = np.random.SeedSequence(self._root.entropy, spawn_key=(Streams.NAMES.index(name),))
            self._made[name] = np.random.Generator(np.random.PCG64(seq))
        return self._made[name]


def split_streams(source: int | np.random.Generator | None) -> Streams:
    """Named generators derived from one seed, or one shared Generator."""
    return Streams(source)


@dataclass
class EstimateReport:
    estimate: float | None
    outcome: str
    chi_sum: int = 0
    q_used: int = 0
    s_used: int = 0
    t_used: int = 0
    m_S: int = 0
    engine: str = ""
    query_counts: QueryCounts = field(default_factory=QueryCounts)
    wallclock: float = 0.0
    flags: list[str] = field(default_factory=list)
    popular: int = 0

    @property
    def ok(self) -> bool:
        return self.outcome == "ok"

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "outcome": self.outcome,
            "chi_sum": self.chi_sum,
            "q": self.q_used,
            "s": self.s_used,
            "t": self.t_used,
            "m_S": self.m_S,
            "engine": self.engine,
            "queries": self.query_counts.as_dict(),
            "flags": list(self.flags),
            "popular_vertices": self.popular,
        }


def approximate_cliques(
    oracle: QueryOracle,
    params: Params,
    rng: int | np.random.Generator | None = None,
    engine: str = "auto",
) -> EstimateReport:
    """Estimate the number of k-cliques given ``params.ckbar`` as a scale guess.

    ``engine`` selects how the sampling rounds run: ``"scalar"`` and
    ``"batch"`` issue every query through the oracle (one call at a time or
    vectorized); ``"closed"`` pre-queries the 2-hop neighborhood of S and
    draws the round outcomes from their exact law.  ``"auto"`` uses
    ``"closed"`` exactly when q exceeds mbar, otherwise ``"batch"``.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    streams = split_streams(params.seed if rng is None else rng)
    start = time.perf_counter()
    before = oracle.counts.copy()
    graph = oracle.graph
    n, k = params.n, params.k
    if n != graph.n:
        raise ValueError(f"params built for n={n}, graph has n={graph.n}")
    report = EstimateReport(estimate=None, outcome="fail")

    def finish(estimate, outcome="ok", *flags):
        report.estimate = estimate
        report.outcome = outcome
        report.flags.extend(flags)
        report.query_counts = oracle.counts - before
        report.wallclock = time.perf_counter() - start
        return report

    if params.eps <= params.mbar ** (-k / 2):
        oracle.charge(degree=n, neighbor=graph.m)
        report.engine = "exact"
        return finish(float(count_cliques_exact(graph, k).total), "ok", "exact_enumeration")

    if params.s >= n:
        members = np.arange(n)
    else:
        members = oracle.uniform_vertices(streams.s_draw, params.s)
    S = VertexMultiset.query(oracle, members)
    s_sampler = EdgeSampler(S)
    report.s_used = S.size
    report.m_S = S.m_of

    typical = sample_degrees_typical(oracle, params, streams.t_draw if params.t < n else None)
    if typical is None:
        return finish(None, "fail", "typical_set_failed")
    report.t_used = typical.t

    q = params.q_for(S.m_of, S.size)
    report.q_used = q
    if q == 0:
        report.engine = engine
        return finish(0.0, "ok", "empty_edge_sample")
    if engine == "auto":
        engine = "closed" if q > params.mbar else "batch"
    report.engine = engine

    if engine == "closed":
        budget = params.mbar / (1 - params.eps)
        if not pre_query(graph, oracle, S.members, typical.multiset.members, budget):
            return finish(None, "fail", "budget_exceeded")
        table = clique_table(graph, k)
        weights, plan = _closed_law(graph, table, params, typical)
        popular = draw_verdicts(plan, params, streams.popularity)
        report.popular = int(popular[table.vertices].sum())
        assigned = assignment(table, popular)
        full = S.size == n and params.s >= n
        mult = None if full else S.multiplicity(n)
        p = hit_probability(table, weights, mult, S.m_of, assigned)
        chi = int(streams.clique.binomial(q, p))
    else:
        verdicts = VerdictCache(typical, oracle, params, streams.popularity, engine)
        chi = _run_rounds(s_sampler, typical, oracle, params, streams.clique, q, verdicts, engine)
        report.popular = sum(v.popular for v in verdicts.verdicts.values())

    report.chi_sum = chi
    scale = S.m_of * params.theta_pow / (params.k_fact * (S.size / n))
    return finish(scale * chi / q)


def _closed_law(graph, table, params, typical):
    """Row weights and popularity plan; memoized on the graph when T = V.

    With T = V neither depends on any random draw, so repeated calls at
    the same parameters (as in the guess search) reuse them.
    """
    if not typical.is_full:
        weights = row_weights(graph, table, params, typical)
        return weights, verdict_plan(graph, table, params, weights)
    key = ("closed_law", params.k, params.n, params.theta, params.tau_c, params.tau_d,
           params.eps_bar, params.delta_bar, params.constants)
    hit = graph._cache.get(key)
    if hit is None:
        weights = row_weights(graph, table, params, typical)
        hit = graph._cache[key] = (weights, verdict_plan(graph, table, params, weights))
    return hit


def _run_rounds(s_sampler, typical, oracle, params, rng, q, verdicts, engine) -> int:
    chi = 0
    if engine == "scalar":
        for _ in range(q):
            tup = sample_a_clique(s_sampler, typical, oracle, params, rng)
            if tup is not None:
                chi += _charged_to_anchor(tup.vertices, oracle, verdicts)
        return chi
    left = q
    while left:
        size = min(left, CHUNK)
        for row in sample_cliques(s_sampler, typical, oracle, params, rng, size).tolist():
            chi += _charged_to_anchor(row, oracle, verdicts)
        left -= size
    return chi


def _charged_to_anchor(vertices, oracle, verdicts) -> bool:
    """Whether the anchor is the first unpopular vertex of the clique."""
    keyed = sorted((oracle.degree(x), x) for x in vertices)
    flags = {x: verdicts.popular(x) for x in vertices}
    for _, x in keyed:
        if not flags[x]:
            return x == vertices[0]
    return False


@dataclass(frozen=True)
class AssignmentCensus:
    unassigned: int
    alpha: np.ndarray

    @property
    def assigned(self) -> int:
        return int(self.alpha.sum())


def unassigned_clique_mass(graph: Graph, popular: Mapping[int, bool] | np.ndarray, k: int) -> AssignmentCensus:
    """Charge every clique to its first unpopular vertex by full enumeration."""
    if isinstance(popular, Mapping):
        flags = np.zeros(graph.n, dtype=bool)
        for u, p in popular.items():
            flags[u] = bool(p)
    else:
        flags = np.asarray(popular, dtype=bool)
    alpha = np.zeros(graph.n, dtype=np.int64)
    unassigned = 0
    for clique in iter_cliques(graph, k):
        for x in clique:
            if not flags[x]:
                alpha[x] += 1
                break
        else:
            unassigned += 1
    return AssignmentCensus(unassigned, alpha)
