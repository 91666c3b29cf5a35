"""Sampling k-tuples from C(S) with near-uniform probability.

C(S) holds the tuples ``(u, v, w_1, ..., w_{k-2})`` with ``u`` in S, all
vertices pairwise adjacent, and ``v`` before every ``w_j`` in the degree
order.  One call returns a fixed tuple of C(S) with probability
``(1 +- eps_bar) / (m(S) * theta^(k-2))`` when T is degrees-typical, and
exactly ``1 / (m(S) * theta^(k-2))`` when T is the whole vertex set.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

import numpy as np

from .graph import QueryOracle, precedes_by
from .params import Params
from .samplers import EdgeSampler
from .typical import TypicalSet

_RATIO_TOL = 1e-9


class CliqueTuple(NamedTuple):
    u: int
    v: int
    w: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.u, self.v, *self.w)


def _acceptance(m_T: int, d_y, t: int, n: int, theta: float):
    ratio = m_T / (d_y * (t / n) * theta)
    if np.max(ratio) > 1 + _RATIO_TOL:
        raise AssertionError(
            f"high-degree acceptance probability {np.max(ratio):.6g} > 1; "
            "T violates m(T) <= (t/n) 4 mbar"
        )
    return ratio


def sample_a_clique(
    s_sampler: EdgeSampler,
    typical: TypicalSet,
    oracle: QueryOracle,
    params: Params,
    rng: np.random.Generator,
) -> CliqueTuple | None:
    """One draw from C(S); ``None`` means the attempt failed."""
    theta, n = params.theta, params.n
    u, v = s_sampler.sample_edge(oracle, rng)
    dv = oracle.degree(v)
    ws = []
    for _ in range(params.k - 2):
        if dv <= theta:
            w = oracle.neighbor(v, int(rng.integers(dv)) + 1)
            if rng.random() >= dv / theta:
                return None
            dw = oracle.degree(w)
        else:
            _, y = typical.sampler.sample_edge(oracle, rng)
            dy = oracle.degree(y)
            if dy <= theta:
                return None
            if rng.random() >= _acceptance(typical.m_of_T, dy, typical.t, n, theta):
                return None
            w, dw = y, dy
        # the order test is decided by degrees already in hand; failing it
        # here saves the pair queries without changing the outcome
        if not precedes_by(dv, v, dw, w):
            return None
        ws.append(w)
    answered = {}
    for a, b in combinations((u, v, *ws), 2):
        key = (a, b) if a <= b else (b, a)
        if key not in answered:
            answered[key] = oracle.pair(a, b)
        if not answered[key]:
            return None
    return CliqueTuple(u, v, tuple(ws))


def sample_cliques(
    s_sampler: EdgeSampler,
    typical: TypicalSet,
    oracle: QueryOracle,
    params: Params,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """``size`` independent draws at once.

    Returns the successful tuples as rows ``(u, v, w_1, ..., w_{k-2})``.
    Query accounting matches ``size`` scalar calls.
    """
    k, theta, n = params.k, params.theta, params.n
    u, v = s_sampler.sample_edges(oracle, rng, size)
    dv = oracle.degrees(v)
    rows = np.arange(size)
    W = np.empty((size, k - 2), dtype=np.int64)
    for j in range(k - 2):
        low = dv[rows] <= theta
        keep_rows = []
        lo = rows[low]
        if lo.size:
            d = dv[lo]
            w = oracle.neighbors(v[lo], rng.integers(d) + 1)
            kept = rng.random(lo.size) < d / theta
            lo, w = lo[kept], w[kept]
            dw = oracle.degrees(w)
            ordered = (d[kept] < dw) | ((d[kept] == dw) & (v[lo] < w))
            W[lo[ordered], j] = w[ordered]
            keep_rows.append(lo[ordered])
        hi = rows[~low]
        if hi.size:
            _, y = typical.sampler.sample_edges(oracle, rng, hi.size)
            dy = oracle.degrees(y)
            big = dy > theta
            hi, y, dy = hi[big], y[big], dy[big]
            ratio = _acceptance(typical.m_of_T, dy, typical.t, n, theta) if hi.size else dy
            kept = rng.random(hi.size) < ratio
            hi, y, dy = hi[kept], y[kept], dy[kept]
            ordered = (dv[hi] < dy) | ((dv[hi] == dy) & (v[hi] < y))
            W[hi[ordered], j] = y[ordered]
            keep_rows.append(hi[ordered])
        rows = np.sort(np.concatenate(keep_rows)) if keep_rows else rows[:0]
        if not rows.size:
            break
    nodes = np.column_stack([u[rows], v[rows], W[rows]]) if rows.size else np.empty((0, k), np.int64)
    if not rows.size:
        return nodes
    # pair queries: memoised per tuple, stop at the first non-adjacent pair
    pairs = list(combinations(range(k), 2))
    a = np.minimum(nodes[:, [p[0] for p in pairs]], nodes[:, [p[1] for p in pairs]])
    b = np.maximum(nodes[:, [p[0] for p in pairs]], nodes[:, [p[1] for p in pairs]])
    codes = a * n + b
    adj = oracle.adjacent(a.ravel(), b.ravel()).reshape(a.shape)
    fresh = np.ones_like(adj)
    for j in range(1, len(pairs)):
        fresh[:, j] = ~np.any(codes[:, :j] == codes[:, [j]], axis=1)
    failing = ~adj
    first_fail = np.where(failing.any(axis=1), failing.argmax(axis=1), len(pairs) - 1)
    within = np.arange(len(pairs))[None, :] <= first_fail[:, None]
    oracle.charge(pair=int((fresh & within).sum()))
    return nodes[adj.all(axis=1)]


def is_clique_tuple(graph, tup, k: int) -> bool:
    """Independent re-verification of a returned tuple against the graph."""
    verts = tuple(int(x) for x in tup)
    if len(verts) != k:
        return False
    for a, b in combinations(verts, 2):
        if a == b or not graph.has_edge(a, b):
            return False
    deg = graph.degrees
    v = verts[1]
    return all(precedes_by(deg[v], v, deg[w], w) for w in verts[2:])
