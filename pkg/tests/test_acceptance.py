"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in an
"acceptance" section at the end of the pytest run.
"""

from __future__ import annotations

import math
import statistics
import subprocess
import sys
from collections import Counter
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from subclique.baseline import claim_bound, count_cliques_exact, count_cliques_naive, gen_gnm, gen_path_plus_clique
from subclique.cli import query_bound
from subclique.cliques import sample_cliques
from subclique.estimator import approximate_cliques, unassigned_clique_mass
from subclique.graph import Graph, QueryOracle
from subclique.popularity import VerdictCache, is_popular
from subclique.samplers import EdgeSampler, VertexMultiset
from subclique.search import approximate_cliques_auto, geometric_search, make_search_config

from conftest import book, brute_tuples, complete, full_typical, make_params, record

EPS, DELTA = 0.5, 0.1


def end_to_end_instances() -> list[tuple[str, Graph, int]]:
    return [
        ("path(2000)+K8 k=3", gen_path_plus_clique(2000, 8), 3),
        ("path(2000)+K8 k=4", gen_path_plus_clique(2000, 8), 4),
        ("G(500,4000) k=3", gen_gnm(500, 4000, seed=0), 3),
    ]


def within(est, c: int, eps: float = EPS) -> bool:
    return est is not None and abs(est - c) <= eps * c


# --- 1 -------------------------------------------------------------------------


def test_criterion_1_exact_matches_naive():
    rng = np.random.default_rng(1)
    mismatches = []
    for i in range(200):
        n = int(rng.integers(4, 21))
        k = int(rng.integers(3, 6))
        me = int(rng.integers(0, n * (n - 1) // 2 + 1))
        g = gen_gnm(n, me, seed=i)
        exact, naive = count_cliques_exact(g, k).total, count_cliques_naive(g, k)
        if exact != naive:
            mismatches.append((i, n, me, k, exact, naive))
    assert record(1, not mismatches, f"200 graphs, {len(mismatches)} mismatches")


# --- 2 -------------------------------------------------------------------------


def wheel(rim: int) -> Graph:
    return Graph.from_edges(rim + 1, [(0, i) for i in range(1, rim + 1)]
                            + [(i, i % rim + 1) for i in range(1, rim + 1)])


def two_k4_on_an_edge() -> Graph:
    edges = set(combinations(range(4), 2)) | set(combinations([0, 1, 4, 5], 2))
    return Graph.from_edges(10, sorted(edges) + [(5, 6), (6, 7), (7, 8), (8, 9)])


# the empirical distance to uniform has a noise floor near sqrt(m(S) theta^(k-2) / (2 pi calls)),
# so every case keeps m(S) theta^(k-2) small enough for that floor to sit near 0.01
UNIFORMITY_CASES = [
    ("K4", complete(4), 3, range(4)),
    ("K5", complete(5), 3, range(5)),
    ("K5 singleton", complete(5), 4, [0]),
    ("book(15) hubs+4", book(15), 3, range(6)),
    ("wheel(12)", wheel(12), 3, range(13)),
    ("G(12,30) half", gen_gnm(12, 30, seed=1), 3, range(6)),
    ("G(16,60) quarter", gen_gnm(16, 60, seed=2), 3, range(4)),
    ("K6 singleton", complete(6), 4, [0]),
    ("two K4 + tail", two_k4_on_an_edge(), 3, range(10)),
    ("two K4 + tail singleton", two_k4_on_an_edge(), 4, [0]),
]


def uniformity(g: Graph, k: int, members, calls: int, seed: int) -> tuple[float, float, float, float]:
    """Total-variation distance to uniform over C(S), success rate, its target and standard error."""
    o = QueryOracle(g)
    p = make_params(g, k)
    members = np.asarray(list(members))
    S = EdgeSampler(VertexMultiset.query(o, members))
    T = full_typical(o)
    tuples = brute_tuples(g, members, k)
    rng = np.random.default_rng(seed)
    got: Counter = Counter()
    left = calls
    while left:
        size = min(left, 1 << 17)
        for row in sample_cliques(S, T, o, p, rng, size).tolist():
            got[tuple(row)] += 1
        left -= size
    hits = sum(got.values())
    assert set(got) <= set(tuples)
    tv = 0.5 * sum(abs(got[t] / hits - 1 / len(tuples)) for t in tuples)
    target = len(tuples) / (S.m_of * p.theta ** (k - 2))
    rate = hits / calls
    se = math.sqrt(rate * (1 - rate) / calls)
    return tv, rate, target, se


def test_criterion_2_sampler_uniformity():
    lines, ok = [], True
    eps_bar = EPS / 5
    for i, (name, g, k, members) in enumerate(UNIFORMITY_CASES):
        assert g.n <= 20
        tv, rate, target, se = uniformity(g, k, members, 1_000_000, seed=i)
        good = tv <= 0.02 and (1 - eps_bar) * target - 3 * se <= rate <= (1 + eps_bar) * target + 3 * se
        ok &= good
        lines.append(f"{name}: tv={tv:.4f} rate={rate:.5f} target={target:.5f}")
    # the hubs of book(15) sit above theta, so the high-pivot branch is covered
    g = UNIFORMITY_CASES[3][1]
    assert g.degrees[0] > make_params(g, 3).theta
    assert record(2, ok, "; ".join(lines))


# --- 3 -------------------------------------------------------------------------


def popular_pair_graph() -> Graph:
    """K23 (popular vertex 0), K5 (unpopular vertex 23) and a path tail."""
    edges = list(combinations(range(23), 2)) + list(combinations(range(23, 28), 2))
    edges += [(i, i + 1) for i in range(28, 99)]
    return Graph.from_edges(100, edges)


def test_criterion_3_popularity_two_sided():
    g = popular_pair_graph()
    p = make_params(g, 3, ckbar=1)
    census = count_cliques_exact(g, 3)
    hot, cold = 0, 23
    assert census.c(hot) > p.tau_c and g.degrees[hot] <= p.tau_d
    assert census.c(cold) <= p.tau_c / 4 and g.degrees[cold] <= p.tau_d
    o = QueryOracle(g)
    T = full_typical(o)
    rng = np.random.default_rng(3)
    runs = 1000
    miss_hot = sum(not is_popular(hot, T, o, p, rng).popular for _ in range(runs))
    miss_cold = sum(is_popular(cold, T, o, p, rng).popular for _ in range(runs))
    base = 2 * p.delta_bar / g.n
    bound = base + 3 * math.sqrt(base * (1 - base) / runs)
    ok = miss_hot / runs <= bound and miss_cold / runs <= bound
    assert record(3, ok, f"popular missed {miss_hot}/{runs}, unpopular flagged {miss_cold}/{runs}, bound {bound:.4f}")


# --- 4 -------------------------------------------------------------------------


def assignment_instances() -> list[tuple[str, Graph, int]]:
    return end_to_end_instances() + [
        ("book(15) k=3", book(15), 3),
        ("K23+K5+tail k=3", popular_pair_graph(), 3),
        ("G(200,2000) k=4", gen_gnm(200, 2000, seed=5), 4),
    ]


def test_criterion_4_assignment_miss():
    lines, ok = [], True
    for i, (name, g, k) in enumerate(assignment_instances()):
        census = count_cliques_exact(g, k)
        C = census.total
        p = make_params(g, k, ckbar=C / 2, mbar=(1 - EPS / 5) * g.m)
        o = QueryOracle(g)
        verdicts = VerdictCache(full_typical(o), o, p, np.random.default_rng(i))
        popular = np.zeros(g.n, dtype=bool)
        # only vertices inside some clique can change the assignment
        for u in np.flatnonzero(census.per_vertex):
            popular[u] = verdicts.popular(int(u))
        miss = unassigned_clique_mass(g, popular, k)
        good = miss.unassigned <= p.eps_bar * C and miss.assigned + miss.unassigned == C
        ok &= good
        lines.append(f"{name}: unassigned {miss.unassigned}/{C}, popular {int(popular.sum())}")
    assert record(4, ok, "; ".join(lines))


# --- 5 -------------------------------------------------------------------------


def test_criterion_5_end_to_end():
    lines, ok = [], True
    trials = 200
    for name, g, k in end_to_end_instances():
        C = count_cliques_exact(g, k).total
        p = make_params(g, k, ckbar=C / 2, mbar=(1 - EPS / 5) * g.m, eps=EPS, delta=DELTA)
        good = sum(within(approximate_cliques(QueryOracle(g), p, s).estimate, C) for s in range(trials))
        ok &= good / trials >= 1 - DELTA - 0.05
        lines.append(f"{name}: {good}/{trials} within (1±{EPS})·{C}")
    assert record(5, ok, "; ".join(lines))


# --- 6 -------------------------------------------------------------------------


def stub_search_checks() -> bool:
    config = make_search_config(2**10, 0.25)
    exact = geometric_search(lambda a, e, d: 300.0, config)
    echo = geometric_search(lambda a, e, d: a, config)
    L = int(math.log2(config.B)) + 1
    return exact.value == 300.0 and echo.outcome == "fail" and len(echo.trajectory) == L * (L + 1) // 2


@pytest.mark.slow
def test_criterion_6_search():
    lines, ok = [], stub_search_checks()
    lines.append(f"stubs {'ok' if ok else 'broken'}")
    trials = 100
    for name, g, k in end_to_end_instances():
        C = count_cliques_exact(g, k).total
        good = sum(within(approximate_cliques_auto(QueryOracle(g), k, EPS, seed=s).estimate, C) for s in range(trials))
        ok &= good / trials >= 0.75
        lines.append(f"{name}: {good}/{trials}")
    assert record(6, ok, "; ".join(lines))


# --- 7 -------------------------------------------------------------------------


def test_criterion_7_query_shape():
    n, k, trials = 2000, 3, 20
    fitted, lines = [], []
    for t in (6, 8, 10, 12):
        g = gen_path_plus_clique(n, t)
        C = math.comb(t, k)
        p = make_params(g, k, ckbar=C / 2, mbar=(1 - EPS / 5) * g.m)
        mean_q = statistics.fmean(approximate_cliques(QueryOracle(g), p, s).query_counts.total for s in range(trials))
        c = mean_q / query_bound(g.n, g.m, C, k)
        fitted.append(c)
        lines.append(f"t={t}: queries {mean_q:.0f}, constant {c:.3f}")
    spread = max(fitted) / min(fitted)
    # reported, not gated: the line says whether the ratio stayed under 10
    record(7, spread <= 10, f"max/min constant {spread:.2f} (report only); " + "; ".join(lines))
    assert all(np.isfinite(fitted))


# --- 8 -------------------------------------------------------------------------


def test_criterion_8_identities():
    graphs = [g for _, g, _ in assignment_instances()] + [g for _, g, _, _ in UNIFORMITY_CASES]
    rng = np.random.default_rng(8)
    for i in range(100):
        n = int(rng.integers(2, 40))
        graphs.append(gen_gnm(n, int(rng.integers(0, n * (n - 1) // 2 + 1)), seed=i))
    bad = 0
    for g in graphs:
        for k in (3, 4, 5):
            census = count_cliques_exact(g, k)
            bad += census.total > claim_bound(g.m, k) or int(census.per_vertex.sum()) != k * census.total
    assert record(8, bad == 0, f"{3 * len(graphs)} (graph, k) pairs, {bad} violations")


# --- 9 -------------------------------------------------------------------------


def test_criterion_9_byte_identical(tmp_path):
    graph = tmp_path / "g.txt"
    subprocess.run([sys.executable, "-m", "subclique", "gen", "gnm", "--n", "80", "--m-edges", "400",
                    "--seed", "1", "--out", str(graph)], check=True)
    runs = {}
    for cmd in (["estimate", "--ckbar", "50", "--trials", "3"], ["auto", "--trials", "1"]):
        outs = [
            subprocess.run([sys.executable, "-m", "subclique", *cmd, "--graph", str(graph), "--seed", "4",
                            "--deterministic", "--with-exact"], check=True, capture_output=True,
                           env={"PATH": "", "SUBCLIQUE_THREADS": "1", "PYTHONHASHSEED": str(i)},
                           cwd=Path(__file__).parent).stdout
            for i in range(2)
        ]
        runs[cmd[0]] = outs[0] == outs[1] and len(outs[0]) > 0
    assert record(9, all(runs.values()), ", ".join(f"{c} {'identical' if v else 'differs'}" for c, v in runs.items()))
