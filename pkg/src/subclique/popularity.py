"""Classifying vertices as popular or unpopular by repeated clique sampling from {u}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cliques import sample_a_clique, sample_cliques
from .graph import QueryOracle
from .params import Params
from .samplers import EdgeSampler, VertexMultiset
from .typical import TypicalSet

CHUNK = 1 << 16


@dataclass(frozen=True)
class PopularityVerdict:
    vertex: int
    popular: bool
    estimate: float | None
    trials_used: int


def count_hits(s_sampler, typical, oracle, params, rng, trials: int, engine: str = "batch") -> int:
    """Number of successful clique draws out of ``trials``."""
    if engine == "scalar":
        return sum(
            sample_a_clique(s_sampler, typical, oracle, params, rng) is not None
            for _ in range(trials)
        )
    hits = 0
    left = trials
    while left:
        size = min(left, CHUNK)
        hits += len(sample_cliques(s_sampler, typical, oracle, params, rng, size))
        left -= size
    return hits


def is_popular(
    u: int,
    typical: TypicalSet,
    oracle: QueryOracle,
    params: Params,
    rng: np.random.Generator,
    engine: str = "batch",
) -> PopularityVerdict:
    d = oracle.degree(u)
    if d > params.tau_d:
        return PopularityVerdict(u, True, None, 0)
    if d == 0:
        return PopularityVerdict(u, False, 0.0, 0)
    r = params.r_for(d)
    single = EdgeSampler(VertexMultiset(np.array([u]), np.array([d])))
    hits = count_hits(single, typical, oracle, params, rng, r, engine)
    # each clique through u appears as (k-2)! tuples of C({u})
    est = d * params.theta_pow * hits / (params.k_fact * r)
    return PopularityVerdict(u, est >= params.tau_c / 2, est, r)


class VerdictCache:
    """Write-once verdicts for one run, so every caller sees the same partition."""

    def __init__(self, typical, oracle, params, rng, engine: str = "batch"):
        self.typical = typical
        self.oracle = oracle
        self.params = params
        self.rng = rng
        self.engine = engine
        self.verdicts: dict[int, PopularityVerdict] = {}

    def __call__(self, u: int) -> PopularityVerdict:
        u = int(u)
        if u not in self.verdicts:
            self.verdicts[u] = is_popular(u, self.typical, self.oracle, self.params, self.rng, self.engine)
        return self.verdicts[u]

    def popular(self, u: int) -> bool:
        return self(u).popular
