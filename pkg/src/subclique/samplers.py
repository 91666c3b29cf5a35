"""Degree-proportional alias tables and uniform sampling from E(S)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .graph import QueryOracle


class AliasTable:
    """Vose's alias method over integer weights: O(len) build, O(1) draws.

    Construction runs in exact integer arithmetic, so zero weights are never
    drawn and :meth:`marginals` reproduces ``w / sum(w)`` exactly.
    """

    def __init__(self, weights):
        w = [int(x) for x in weights]
        if not w:
            raise ValueError("weights must be non-empty")
        if any(x < 0 for x in w):
            raise ValueError("weights must be non-negative")
        total = sum(w)
        if total <= 0:
            raise ValueError("weights sum to zero")
        size = len(w)
        # column i keeps index i with probability num[i] / total
        scaled = [x * size for x in w]
        num = [total] * size
        alias = list(range(size))
        small = [i for i, p in enumerate(scaled) if p < total]
        large = [i for i, p in enumerate(scaled) if p >= total]
        while small and large:
            lo = small.pop()
            hi = large.pop()
            num[lo] = scaled[lo]
            alias[lo] = hi
            scaled[hi] -= total - scaled[lo]
            if scaled[hi] < total:
                small.append(hi)
            else:
                large.append(hi)
        assert not small, "exact arithmetic leaves no deficient columns"
        self.total = total
        self.numerators = num
        self.prob = np.array(num, dtype=float) / total
        self.alias = np.array(alias, dtype=np.int64)
        self.size = size

    def draw(self, rng: np.random.Generator) -> int:
        i = int(rng.integers(self.size))
        return i if rng.random() < self.prob[i] else int(self.alias[i])

    def draws(self, rng: np.random.Generator, size: int) -> np.ndarray:
        i = rng.integers(self.size, size=size)
        keep = rng.random(size) < self.prob[i]
        return np.where(keep, i, self.alias[i])

    def marginals(self) -> list[Fraction]:
        """Exact selection probability of every index, read off the table."""
        out = [Fraction(x, self.total) for x in self.numerators]
        for i, a in enumerate(self.alias.tolist()):
            out[a] += Fraction(self.total - self.numerators[i], self.total)
        return [x / self.size for x in out]


@dataclass(frozen=True)
class VertexMultiset:
    """Vertices with multiplicity, with their degrees already queried."""

    members: np.ndarray
    degrees: np.ndarray

    @classmethod
    def query(cls, oracle: QueryOracle, members) -> VertexMultiset:
        members = np.asarray(members, dtype=np.int64)
        return cls(members, oracle.degrees(members))

    @property
    def size(self) -> int:
        return int(self.members.size)

    @cached_property
    def m_of(self) -> int:
        return int(self.degrees.sum())

    def multiplicity(self, n: int) -> np.ndarray:
        return np.bincount(self.members, minlength=n)


class EdgeSampler:
    """The structure D(S): uniform ordered edges from E(S).

    A member is drawn with probability proportional to its degree, then
    one of its neighbors uniformly, so each edge of E(S) (counted with
    the multiplicity of its origin) has probability exactly 1 / m(S).
    """

    def __init__(self, multiset: VertexMultiset):
        self.multiset = multiset
        self.m_of = multiset.m_of

    @cached_property
    def table(self) -> AliasTable | None:
        # built on first draw; callers that never sample skip the O(|S|) pass
        return AliasTable(self.multiset.degrees) if self.m_of > 0 else None

    @cached_property
    def _members(self) -> list[int]:
        return self.multiset.members.tolist()

    @cached_property
    def _degrees(self) -> list[int]:
        return self.multiset.degrees.tolist()

    @property
    def empty(self) -> bool:
        return self.m_of == 0

    def sample_edge(self, oracle: QueryOracle, rng: np.random.Generator) -> tuple[int, int]:
        if self.table is None:
            raise ValueError("cannot sample from an empty edge set")
        i = self.table.draw(rng)
        u = self._members[i]
        return u, oracle.neighbor(u, int(rng.integers(self._degrees[i])) + 1)

    def sample_edges(self, oracle: QueryOracle, rng: np.random.Generator, size: int):
        if self.table is None:
            raise ValueError("cannot sample from an empty edge set")
        i = self.table.draws(rng, size)
        u = self.multiset.members[i]
        j = rng.integers(self.multiset.degrees[i]) + 1
        return u, oracle.neighbors(u, j)


def build_sampler(oracle: QueryOracle, multiset: VertexMultiset) -> EdgeSampler:
    return EdgeSampler(multiset)


def sample_edge(sampler: EdgeSampler, oracle: QueryOracle, rng: np.random.Generator) -> tuple[int, int]:
    return sampler.sample_edge(oracle, rng)
