"""Mixture-of-finite-models prior on the number of reachable terminal states.

``K ~ P_K`` and, given ``K = k``, basin sizes are symmetric Dirichlet with
parameter ``alpha / k``. ``L_k(n)`` is the probability that ``n`` restarts
all land on one fixed terminal state given ``K = k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from ._special import log_rising_ratio

GEOMETRIC = "geometric"
ZT_POISSON = "zt_poisson"
CUSTOM = "custom"


@dataclass(frozen=True)
class MfmPrior:
    """Prior on K plus the Dirichlet concentration ``alpha``.

    ``geometric``: P(K=k) = theta (1-theta)^(k-1); theta = 1/2 gives 2^-k.
    ``zt_poisson``: Poisson(theta) conditioned on K >= 1.
    ``custom``: ``pmf[i]`` is P(K = i + 1).
    """

    family: str = GEOMETRIC
    theta: float = 0.5
    alpha: float = 1.0
    k_max: int = 200
    pmf: tuple = field(default=())

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.k_max < 2:
            raise ValueError("k_max must be >= 2")
        if self.family == GEOMETRIC:
            if not 0 < self.theta <= 1:
                raise ValueError("geometric theta must lie in (0, 1]")
        elif self.family == ZT_POISSON:
            if not self.theta > 0:
                raise ValueError("Poisson rate must be positive")
        elif self.family == CUSTOM:
            p = np.asarray(self.pmf, dtype=float)
            if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise ValueError("custom pmf must be nonnegative and sum to 1")
        else:
            raise ValueError(f"unknown P_K family {self.family!r}")

    def log_pmf(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        with np.errstate(divide="ignore"):
            if self.family == GEOMETRIC:
                if self.theta == 1:
                    return np.where(k == 1, 0.0, -np.inf)
                return math.log(self.theta) + (k - 1) * math.log1p(-self.theta)
            if self.family == ZT_POISSON:
                lam = self.theta
                return k * math.log(lam) - lam - gammaln(k + 1) - math.log(-math.expm1(-lam))
            p = np.asarray(self.pmf, dtype=float)
            idx = k.astype(int) - 1
            inside = (idx >= 0) & (idx < p.size)
            vals = np.where(inside, p[np.clip(idx, 0, p.size - 1)], 0.0)
            return np.log(vals)

    def pmf_values(self, k) -> np.ndarray:
        return np.exp(self.log_pmf(k))

    def tail_mass(self, k_max: int | None = None) -> float:
        """P(K > k_max)."""
        k_max = self.k_max if k_max is None else k_max
        if self.family == GEOMETRIC:
            return (1.0 - self.theta) ** k_max
        if self.family == ZT_POISSON:
            return float(stats.poisson.sf(k_max, self.theta) / -math.expm1(-self.theta))
        return float(np.sum(np.asarray(self.pmf, dtype=float)[k_max:]))

    def to_dict(self) -> dict:
        out = {"family": self.family, "theta": self.theta, "alpha": self.alpha, "k_max": self.k_max}
        if self.family == CUSTOM:
            out["pmf"] = list(self.pmf)
        return out

    @classmethod
    def from_dict(cls, spec: dict) -> "MfmPrior":
        return cls(spec.get("family", GEOMETRIC), float(spec.get("theta", 0.5)),
                   float(spec.get("alpha", 1.0)), int(spec.get("k_max", 200)),
                   tuple(spec.get("pmf", ())))


def _check(alpha, k, n):
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if np.any(np.asarray(k) < 1) or n < 1:
        raise ValueError("need k >= 1 and n >= 1")


def log_component_likelihood(alpha: float, k, n: int):
    """log L_k(n) = log[Gamma(alpha) Gamma(alpha/k + n) / (Gamma(alpha/k) Gamma(alpha + n))]."""
    _check(alpha, k, n)
    k = np.asarray(k, dtype=float)
    return log_rising_ratio(alpha / k, alpha, n)


def mfm_component_likelihood(alpha: float, k: int, n: int) -> float:
    return float(np.exp(log_component_likelihood(alpha, k, n)))


def mfm_Lk_bounds(alpha: float, k: int, n: int) -> tuple[float, float]:
    """Two-sided power-law bounds on L_k(n) with exponent alpha (1 - 1/k)."""
    _check(alpha, k, n)
    a = alpha / k
    dk = alpha * (1.0 - 1.0 / k)
    lower = math.exp(dk * math.log(a / (n - 1 + a)) - math.log(k))
    upper = math.exp(dk * math.log((1 + alpha) / (n + alpha)) - math.log(k))
    return lower, upper


@dataclass(frozen=True)
class MfmPosterior:
    """Posterior over K = 1..k_max after all-identical restarts.

    ``probs[i]`` is P(K = i + 1) normalized over the truncated support;
    ``tail_bound`` bounds the posterior mass of K > k_max that the truncation
    drops.
    """

    probs: np.ndarray
    tail_bound: float
    n: int

    @property
    def p_unique(self) -> float:
        return float(self.probs[0])


def mfm_posterior_K(prior: MfmPrior, n: int) -> MfmPosterior:
    if n < 1:
        raise ValueError("n must be >= 1")
    ks = np.arange(1, prior.k_max + 1)
    log_w = prior.log_pmf(ks) + log_component_likelihood(prior.alpha, ks, n)
    log_z = logsumexp(log_w)
    probs = np.exp(log_w - log_z)
    # L_k is decreasing in k, so L_{k_max} dominates every omitted likelihood
    tail = prior.tail_mass() * math.exp(float(log_component_likelihood(prior.alpha, prior.k_max, n)))
    z = math.exp(log_z)
    return MfmPosterior(probs, tail / (z + tail), n)


def mfm_K1_bounds(pi1: float, pi2: float, alpha: float, n: int) -> tuple[float, float]:
    """Lower and upper bounds on 1 - P(K=1 | all n restarts agree)."""
    if not (pi1 > 0 and pi2 > 0 and pi1 + pi2 <= 1 + 1e-15):
        raise ValueError("need pi1 > 0, pi2 > 0 and pi1 + pi2 <= 1")
    if n < 1 or not alpha > 0:
        raise ValueError("need n >= 1 and alpha > 0")
    lower = pi2 * 0.5 * (alpha / 2 / (n - 1 + alpha / 2)) ** (alpha / 2)
    upper = (1 - pi1) / pi1 * 0.5 * ((1 + alpha) / (n + alpha)) ** (alpha / 2)
    return lower, upper


def mfm_K1_upper_log(pi1: float, alpha: float, n: int) -> float:
    """Natural log of the upper bound on 1 - P(K=1 | ...), for tiny complements."""
    return (math.log1p(-pi1) - math.log(pi1) - math.log(2.0)
            + alpha / 2 * (math.log1p(alpha) - math.log(n + alpha)))


def dirichlet_coarsen_params(alpha_total: float, K: int, m: int) -> tuple[float, float]:
    """Symmetric Dirichlet parameters (fine, coarse) for mK and K components."""
    if K < 1 or m < 1:
        raise ValueError("K and m must be >= 1")
    return alpha_total / (m * K), alpha_total / K


def log_partition_likelihood(alpha: float, k, counts) -> np.ndarray:
    """Log probability of the observed grouping of labelled draws, given K = k.

    Injective assignments of the ``m`` observed outcomes to the ``k``
    components contribute the falling factorial ``k (k-1) ... (k-m+1)``.
    Returns ``-inf`` where ``k < m``.
    """
    counts = np.asarray(counts, dtype=int)
    if counts.size == 0 or np.any(counts < 1):
        raise ValueError("counts must be a non-empty list of positive integers")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    m = counts.size
    n = int(counts.sum())
    a = alpha / k
    ok = k >= m
    ks = np.where(ok, k, m)
    a = alpha / ks
    falling = gammaln(ks + 1) - gammaln(ks - m + 1)
    body = sum(gammaln(a + c) - gammaln(a) for c in counts)
    log_norm = gammaln(alpha) - gammaln(alpha + n)
    if m == 1:
        body = log_rising_ratio(a, alpha, n)
        log_norm = 0.0
    out = falling + log_norm + body
    return np.where(ok, out, -np.inf)


def mfm_partition_likelihood(alpha: float, k: int, counts) -> float:
    return float(np.exp(log_partition_likelihood(alpha, k, counts))[0])


def log_partition_likelihood_sup(alpha: float, k_from: int, counts) -> float:
    """Log of an upper bound on the partition likelihood over all ``k >= k_from``.

    The falling factorial over ``k^m`` is at most 1 and ``k^m`` times the
    Gamma ratios is decreasing in ``k``.
    """
    counts = np.asarray(counts, dtype=int)
    n = int(counts.sum())
    a = alpha / k_from
    m = counts.size
    return float(gammaln(alpha) - gammaln(alpha + n) + m * math.log(alpha)
                 + sum(gammaln(a + c) - gammaln(a + 1) for c in counts))
