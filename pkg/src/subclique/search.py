"""Guess-free estimation by a halving search over the scale parameter."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .estimator import approximate_cliques
from .graph import QueryCounts, QueryOracle
from .params import Constants, derive_params

# estimator(guess, eps, delta) -> value, or None on failure
Estimator = Callable[[float, float, float], Optional[float]]

EPS_CAP = 0.25
# lowest outer guess in the guess-free search; see approximate_cliques_auto
AUTO_FLOOR = 0.5


@dataclass(frozen=True)
class SearchConfig:
    B: float
    eps: float
    ell: float = 2.0
    floor: float = 1.0

    @property
    def delta_prime(self) -> float:
        return 1 / (5 * 2**self.ell)

    @property
    def r_search(self) -> int:
        log_b = max(math.log2(self.B), 1.0)
        return math.ceil((4 / self.eps) * math.log(2 * log_b**2 / self.delta_prime))

    @property
    def delta_inner(self) -> float:
        return self.delta_prime / (2 * self.r_search)


def make_search_config(upper: float, eps: float, ell: float = 2.0, floor: float = 1.0) -> SearchConfig:
    """Round the upper bound up to a power of two and cap eps at 1/4."""
    if upper < 1:
        raise ValueError("upper bound must be at least 1")
    if not 0 < floor <= 1:
        raise ValueError("floor must be in (0,1]")
    B = 2.0 ** math.ceil(math.log2(upper))
    return SearchConfig(B=B, eps=min(eps, EPS_CAP), ell=ell, floor=floor)


@dataclass
class SearchStep:
    a_tilde: float
    a_bar: float
    x: float
    failures: int
    delta: float
    accepted: bool


@dataclass
class SearchResult:
    value: float | None
    outcome: str
    trajectory: list[SearchStep] = field(default_factory=list)
    invocations: int = 0


def geometric_search(estimator: Estimator, config: SearchConfig) -> SearchResult:
    """Outer guess halves from B; each outer step re-sweeps B, B/2, ..., guess.

    At every swept value the estimator runs ``r_search`` times and the
    minimum is kept (a failed run counts as 0).  The first minimum that
    reaches ``(1 + eps)`` times its guess is returned.  The sweep stops
    once the outer guess drops below ``config.floor``.
    """
    B, eps = config.B, config.eps
    result = SearchResult(None, "fail")
    a_tilde = B
    while a_tilde >= config.floor:
        a_bar = B
        while a_bar >= a_tilde:
            r, delta = config.r_search, config.delta_inner
            values = [estimator(a_bar, eps, delta) for _ in range(r)]
            result.invocations += r
            failures = sum(v is None for v in values)
            x = min(0.0 if v is None else float(v) for v in values)
            hit = x >= (1 + eps) * a_bar
            result.trajectory.append(SearchStep(a_tilde, a_bar, x, failures, delta, hit))
            if hit:
                result.value = x
                result.outcome = "ok"
                return result
            a_bar /= 2
        a_tilde /= 2
    return result


@dataclass
class AutoReport:
    estimate: float | None
    outcome: str
    mbar: float
    mbar_source: str
    B: float | None
    config: SearchConfig | None
    trajectory: list[SearchStep]
    invocations: int
    query_counts: QueryCounts
    wallclock: float
    flags: list[str] = field(default_factory=list)
    raw_fail: bool = False

    @property
    def ok(self) -> bool:
        return self.outcome == "ok"

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "outcome": self.outcome,
            "mbar": self.mbar,
            "mbar_source": self.mbar_source,
            "B": self.B,
            "search": None if self.config is None else {
                "eps": self.config.eps,
                "ell": self.config.ell,
                "floor": self.config.floor,
                "delta_prime": self.config.delta_prime,
                "r_search": self.config.r_search,
                "delta_inner": self.config.delta_inner,
            },
            "trajectory": [
                {"a_tilde": s.a_tilde, "a_bar": s.a_bar, "x": s.x, "failures": s.failures,
                 "delta": s.delta, "accepted": s.accepted}
                for s in self.trajectory
            ],
            "invocations": self.invocations,
            "queries": self.query_counts.as_dict(),
            "flags": list(self.flags),
            "raw_fail": self.raw_fail,
        }


def approximate_cliques_auto(
    oracle: QueryOracle,
    k: int,
    eps: float,
    mbar: str | float = "exact",
    seed: int | None = None,
    constants: Constants = Constants(),
    engine: str = "auto",
) -> AutoReport:
    """Estimate the k-clique count with no prior guess.

    ``mbar="exact"`` reads m off the loaded graph (not charged to the query
    counters) and deflates it by ``1 - eps/5``; a number is used as given.
    """
    start = time.perf_counter()
    before = oracle.counts.copy()
    graph = oracle.graph
    n = graph.n
    if mbar == "exact":
        mbar_value = (1 - eps / 5) * graph.m
        source = "exact"
    else:
        mbar_value = float(mbar)
        source = "supplied"

    def done(estimate, outcome, config, trajectory, invocations, flags, raw_fail=False):
        return AutoReport(
            estimate=estimate, outcome=outcome, mbar=mbar_value, mbar_source=source,
            B=None if config is None else config.B, config=config, trajectory=trajectory,
            invocations=invocations, query_counts=oracle.counts - before,
            wallclock=time.perf_counter() - start, flags=flags, raw_fail=raw_fail,
        )

    if mbar_value < 1 or n < 1:
        return done(0.0, "ok", None, [], 0, ["no_cliques_detectable"], raw_fail=True)

    # a count of 1 can only clear (1 + eps) * guess at a guess below 1, so the
    # sweep runs one level further down; the estimator itself is never told
    # less than C >= 1, since a nonzero count is at least 1
    config = make_search_config(min(float(n) ** k, mbar_value ** (k / 2)), eps, floor=AUTO_FLOOR)
    rng = np.random.default_rng(seed)

    def estimator(guess: float, e: float, d: float) -> float | None:
        params = derive_params(n, k, mbar_value, max(guess, 1.0), e, d, constants=constants,
                               check_ckbar_bound=False)
        rep = approximate_cliques(oracle, params, rng, engine=engine)
        return rep.estimate if rep.ok else None

    res = geometric_search(estimator, config)
    if res.outcome == "ok":
        return done(res.value, "ok", config, res.trajectory, res.invocations, [])
    if all(step.x < 1 for step in res.trajectory):
        return done(0.0, "ok", config, res.trajectory, res.invocations, ["no_cliques_detectable"], raw_fail=True)
    return done(None, "fail", config, res.trajectory, res.invocations, ["search_exhausted"], raw_fail=True)
