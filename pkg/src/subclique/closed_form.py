"""Closed-form evaluation of the sampling rounds once the neighborhood is pre-queried.

When the number of rounds q exceeds mbar, the estimator reads the neighbor
lists of every vertex within distance two of S (plus those of T) up front,
so every later degree, neighbor and pair answer is local.  Given that view
the outcome of a round is a Bernoulli trial whose success probability is a
finite sum over the tuples of C(S); the number of successes over q rounds
is therefore Binomial(q, p).  The same holds for the rounds inside each
popularity test.  Drawing those binomials directly yields exactly the
output distribution of running the rounds one by one, at a cost that does
not grow with q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baseline import iter_cliques
from .graph import Graph, QueryOracle
from .params import Params
from .typical import TypicalSet

_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class CliqueTable:
    """Every (clique, anchor) pair of the graph, i.e. C(V) up to the (k-2)! orderings.

    Row ``i`` stands for the tuples anchored at ``row_u[i]`` with pivot
    ``row_v[i]`` (the earliest remaining vertex in the degree order) and
    remaining vertices ``row_rest[i]`` in any order.
    """

    k: int
    cliques: np.ndarray
    row_clique: np.ndarray
    row_u: np.ndarray
    row_v: np.ndarray
    row_rest: np.ndarray
    vertices: np.ndarray

    @property
    def count(self) -> int:
        return int(self.cliques.shape[0])


def clique_table(graph: Graph, k: int) -> CliqueTable:
    key = ("clique_table", k)
    if key in graph._cache:
        return graph._cache[key]
    cl = list(iter_cliques(graph, k))
    cliques = np.array(cl, dtype=np.int64).reshape(-1, k)
    C = cliques.shape[0]
    rc, ru, rv, rr = [], [], [], []
    ids = np.arange(C)
    for i in range(k):
        cols = [j for j in range(k) if j != i]
        rc.append(ids)
        ru.append(cliques[:, i])
        rv.append(cliques[:, cols[0]])
        rr.append(cliques[:, cols[1:]])
    table = CliqueTable(
        k=k,
        cliques=cliques,
        row_clique=np.concatenate(rc),
        row_u=np.concatenate(ru),
        row_v=np.concatenate(rv),
        row_rest=np.concatenate(rr).reshape(-1, k - 2),
        vertices=np.unique(cliques),
    )
    graph._cache[key] = table
    return table


def row_weights(graph: Graph, table: CliqueTable, params: Params, typical: TypicalSet) -> np.ndarray:
    """``(k-2)!`` times the probability of completing each row's pivot edge."""
    theta = params.theta
    w = np.full(table.row_u.size, params.k_fact / params.theta_pow)
    if typical.is_full or params.k == 2:
        return w
    deg = graph.degrees
    high = deg[table.row_v] > theta
    if high.any():
        rest = table.row_rest[high]
        frac = typical.t / params.n
        ratio = typical.m_of_T / (deg[rest] * frac * theta)
        if ratio.max() > 1 + _RATIO_TOL:
            raise AssertionError("high-degree acceptance probability exceeds 1")
        dT = typical.d_T(graph)
        f = dT[rest] / (deg[rest] * frac * theta)
        w[high] = params.k_fact * f.prod(axis=1)
    return w


@dataclass(frozen=True)
class VerdictPlan:
    """Everything the popularity law needs except the random draws."""

    by_degree: np.ndarray
    cand: np.ndarray
    trials: np.ndarray
    p: np.ndarray
    scale: np.ndarray


def verdict_plan(graph: Graph, table: CliqueTable, params: Params, weights: np.ndarray) -> VerdictPlan:
    """Per-vertex trial counts and per-trial hit probabilities of the popularity test.

    Vertices outside every clique can only be popular through their degree.
    """
    deg = graph.degrees
    by_degree = deg > params.tau_d
    vs = table.vertices
    cand = vs[~by_degree[vs]] if vs.size else vs
    d = deg[cand]
    mass = np.bincount(table.row_u, weights=weights, minlength=graph.n)[cand]
    p = np.minimum(mass / np.maximum(d, 1), 1.0)
    e = params.eps_bar
    r = np.ceil(
        params.constants.r * d * params.theta_pow * math.log(2 * params.n / params.delta_bar)
        / (params.k_fact * params.tau_c * e * e)
    )
    r = np.maximum(r, 1).astype(np.int64)
    scale = d * params.theta_pow / (params.k_fact * r)
    return VerdictPlan(by_degree, cand, r, p, scale)


def draw_verdicts(plan: VerdictPlan, params: Params, rng: np.random.Generator) -> np.ndarray:
    popular = plan.by_degree.copy()
    if plan.cand.size:
        hits = rng.binomial(plan.trials, plan.p)
        popular[plan.cand] = plan.scale * hits >= params.tau_c / 2
    return popular


def closed_form_verdicts(
    graph: Graph,
    table: CliqueTable,
    params: Params,
    weights: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Popular flags for every vertex, drawn with the popularity test's exact law."""
    return draw_verdicts(verdict_plan(graph, table, params, weights), params, rng)


def assignment(table: CliqueTable, popular: np.ndarray) -> np.ndarray:
    """Vertex each clique is charged to (first unpopular in degree order), or -1."""
    if not table.count:
        return np.empty(0, dtype=np.int64)
    unpop = ~popular[table.cliques]
    first = table.cliques[np.arange(table.count), unpop.argmax(axis=1)]
    return np.where(unpop.any(axis=1), first, -1)


def hit_probability(
    table: CliqueTable,
    weights: np.ndarray,
    multiplicity: np.ndarray | None,
    m_S: int,
    assigned: np.ndarray,
) -> float:
    """Probability that one round returns a tuple charged to its anchor."""
    if m_S == 0 or not table.count:
        return 0.0
    ok = assigned[table.row_clique] == table.row_u
    w = weights[ok]
    if multiplicity is not None:
        w = w * multiplicity[table.row_u[ok]]
    return min(float(w.sum()) / m_S, 1.0)


def pre_query(
    graph: Graph,
    oracle: QueryOracle,
    s_members: np.ndarray,
    t_members: np.ndarray,
    budget: float,
) -> bool:
    """Charge the up-front reads of the 2-hop neighborhood of S and of T's lists.

    Returns False (after charging the reads made before aborting) when more
    than ``budget`` edges would be viewed.
    """
    n = graph.n
    deg = graph.degrees
    known = np.zeros(n, dtype=bool)
    known[s_members] = True
    known[t_members] = True
    if known.all():
        lists = known
        touched = known
    else:
        A = graph.sparse()
        s_mask = np.zeros(n, dtype=bool)
        s_mask[s_members] = True
        t_mask = np.zeros(n, dtype=bool)
        t_mask[t_members] = True
        ball = s_mask | (A @ s_mask.astype(np.int64) > 0)
        ball |= A @ ball.astype(np.int64) > 0
        lists = ball | t_mask
        touched = lists | (A @ t_mask.astype(np.int64) > 0)
    viewed = int(deg[lists].sum())
    if viewed > budget:
        oracle.charge(neighbor=int(math.floor(budget)) + 1)
        return False
    oracle.charge(degree=int((touched & ~known).sum()), neighbor=viewed)
    return True
