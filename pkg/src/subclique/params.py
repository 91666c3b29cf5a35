"""Derived constants for one run of the clique estimator.

Every threshold below is the smallest round choice that makes the
corresponding concentration argument close:

* ``theta = 2 sqrt(mbar)`` splits low/high degree.  With
  ``m(T) <= (t/n) 4 mbar`` and ``d(y) > theta`` the high-degree acceptance
  probability ``m(T) / (d(y) (t/n) theta)`` is at most ``4 mbar / theta^2 = 1``.
* ``tau_c = 32 k ckbar^(1-1/k) / eps_bar^(1/k)`` and
  ``tau_d = 4 mbar / (eps_bar ckbar)^(1/k)``.  With ``ckbar >= C/4`` at most
  ``4 k C / tau_c <= (eps_bar C)^(1/k) / 2`` vertices have ``c_k(u) > tau_c/4``,
  and with ``mbar >= (1-eps) m`` at most ``m / tau_d <= (eps_bar C)^(1/k) / 2``
  have ``d(u) > tau_d``; cliques made only of such vertices number at most
  ``eps_bar C``.
* ``s = 128 k n ln(2/delta_bar) / (eps_bar^(2+1/k) ckbar^(1/k))``.  Assigned
  counts per vertex are bounded by ``tau_c``, so Chernoff with summands in
  ``[0, tau_c]`` gives exponent
  ``eps_bar^2 (1-eps_bar) C s / (3 n tau_c) >= (4/3)(1-eps_bar) ln(2/delta_bar)``.
* ``t = 3 (k/eps_bar)^2 (n/sqrt(mbar)) ln(4n/gamma^2)``.  A high-degree vertex
  has ``d(w)/n > 2 sqrt(mbar)/n``, so the two-sided Chernoff bound on
  ``d_T(w)`` is ``2 exp(-2 ln(4n/gamma^2)) <= gamma^2 / (2n)``; a union bound
  over vertices and ``log2(2/gamma)`` draws leaves ``gamma/2``.
* ``gamma = min(mbar^(-k/2), delta_bar)``.
* ``q = 10 ln(2/delta_bar) m(S) theta^(k-2) / (eps_bar^2 (1-eps_bar)^3 (k-2)! ckbar (s/n))``
  makes the Chernoff exponent on the number of hits at least
  ``(10/3) (C/ckbar) ln(2/delta_bar)``.
* ``r(u) = 12 d(u) theta^(k-2) ln(2n/delta_bar) / ((k-2)! tau_c eps_bar^2)``.
  For ``c_k(u) >= tau_c`` the lower-tail exponent is
  ``4 (1-eps_bar) ln(2n/delta_bar) >= ln(n/delta_bar)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Constants:
    """Leading constants of the sample sizes and thresholds."""

    s: float = 128.0
    q: float = 10.0
    t: float = 3.0
    tau_c: float = 32.0
    tau_d: float = 4.0
    r: float = 12.0


@dataclass(frozen=True)
class Params:
    n: int
    k: int
    mbar: float
    ckbar: float
    eps: float
    delta: float
    eps_bar: float
    delta_bar: float
    theta: float
    tau_c: float
    tau_d: float
    s: int
    t: int
    gamma: float
    t_attempts: int
    seed: int | None = None
    constants: Constants = field(default_factory=Constants)

    @property
    def k_fact(self) -> int:
        return math.factorial(self.k - 2)

    @property
    def theta_pow(self) -> float:
        return self.theta ** (self.k - 2)

    def q_for(self, m_s: int, s: int | None = None) -> int:
        """Number of clique-sampling rounds for a multiset with ``m(S) = m_s``."""
        s = self.s if s is None else s
        if m_s == 0:
            return 0
        e = self.eps_bar
        val = (
            self.constants.q * math.log(2 / self.delta_bar) * m_s * self.theta_pow
            / (e * e * (1 - e) ** 3 * self.k_fact * self.ckbar * (s / self.n))
        )
        return math.ceil(val)

    def r_for(self, d: int) -> int:
        """Number of clique-sampling rounds used to classify a vertex of degree ``d``."""
        e = self.eps_bar
        val = (
            self.constants.r * d * self.theta_pow * math.log(2 * self.n / self.delta_bar)
            / (self.k_fact * self.tau_c * e * e)
        )
        return max(1, math.ceil(val))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["constants"] = asdict(self.constants)
        return out


def derive_params(
    n: int,
    k: int,
    mbar: float,
    ckbar: float,
    eps: float,
    delta: float,
    seed: int | None = None,
    constants: Constants = Constants(),
    check_ckbar_bound: bool = True,
) -> Params:
    if k < 3:
        raise ParameterError("k must be at least 3")
    if n < 1:
        raise ParameterError("graph must have at least one vertex")
    if not 0 < eps < 1:
        raise ParameterError("epsilon must be in (0,1)")
    if not 0 < delta < 1:
        raise ParameterError("delta must be in (0,1)")
    if mbar < 1:
        raise ParameterError("mbar must be at least 1")
    if ckbar < 1:
        raise ParameterError("ckbar must be at least 1")
    if check_ckbar_bound and ckbar > mbar ** (k / 2):
        raise ParameterError(f"ckbar={ckbar} exceeds mbar^(k/2)={mbar ** (k / 2):.6g}")

    eps_bar = eps / 5
    delta_bar = delta / 4
    theta = 2 * math.sqrt(mbar)
    tau_c = constants.tau_c * k * ckbar ** (1 - 1 / k) / eps_bar ** (1 / k)
    tau_d = constants.tau_d * mbar / (eps_bar * ckbar) ** (1 / k)
    s_raw = constants.s * k * n * math.log(2 / delta_bar) / (eps_bar ** (2 + 1 / k) * ckbar ** (1 / k))
    s = n if s_raw >= n else math.ceil(s_raw)
    # mbar^(-k/2) underflows harmlessly to 0 only for absurd mbar; keep it positive
    gamma = min(math.exp(-(k / 2) * math.log(mbar)), delta_bar)
    gamma = max(gamma, 1e-300)
    log_term = math.log(4 * n) - 2 * math.log(gamma)
    t_raw = constants.t * (k / eps_bar) ** 2 * (n / math.sqrt(mbar)) * log_term
    t = n if t_raw >= n else math.ceil(t_raw)
    t_attempts = max(1, math.ceil(math.log2(2 / gamma)))
    return Params(
        n=n,
        k=k,
        mbar=float(mbar),
        ckbar=float(ckbar),
        eps=eps,
        delta=delta,
        eps_bar=eps_bar,
        delta_bar=delta_bar,
        theta=theta,
        tau_c=tau_c,
        tau_d=tau_d,
        s=s,
        t=t,
        gamma=gamma,
        t_attempts=t_attempts,
        seed=seed,
        constants=constants,
    )
