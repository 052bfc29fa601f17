"""Uniqueness posterior under a spike at ``s = 1`` mixed with a Beta slab."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate
from scipy.special import betainc, betaln, gamma

from .basin import BetaParams
from .summary import PosteriorSummary


@dataclass(frozen=True)
class SpikeSlabPrior:
    p_spike: float
    slab: BetaParams = BetaParams(1.0, 1.0)

    def __post_init__(self):
        if not 0 <= self.p_spike <= 1:
            raise ValueError("p_spike must lie in [0, 1]")


def slab_moment(slab: BetaParams, n: int) -> float:
    """E[S^n] for S ~ Beta(a, b), via log-Beta."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1.0
    return math.exp(betaln(slab.alpha + n, slab.beta) - betaln(slab.alpha, slab.beta))


def spike_slab_posterior(prior: SpikeSlabPrior, n: int) -> PosteriorSummary:
    p = prior.p_spike
    if p in (0.0, 1.0):
        return PosteriorSummary(p, n=n, method="spike_slab")
    m = slab_moment(prior.slab, n)
    return PosteriorSummary(p / (p + (1 - p) * m), n=n, method="spike_slab")


def slab_near_one_cdf(slab: BetaParams) -> Callable[[float], float]:
    """u -> P(S >= 1 - u) for the Beta slab."""
    def F(u):
        return float(betainc(slab.beta, slab.alpha, u))  # S >= 1-u  <=>  1-S <= u
    return F


def moment_tail_bound(F_near_one: Callable[[float], float], delta: float, n: int) -> float:
    """``n * int_0^delta exp(-(n-1) u) F(u) du + (1-delta)^n``, an upper bound on E[S^n]."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    val, _ = integrate.quad(lambda u: math.exp(-(n - 1) * u) * F_near_one(u), 0.0, delta,
                            epsabs=1e-12, epsrel=1e-10, limit=200,
                            points=[min(delta, 1.0 / n)] if n > 1 and 1.0 / n < delta else None)
    return n * val + (1.0 - delta) ** n


def poly_tail_rate_bound(C: float, gamma_: float, delta: float, n: int) -> float:
    """``C Gamma(gamma+1) n / (n-1)^(gamma+1) + (1-delta)^n`` for tails ``F(u) <= C u^gamma``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (C > 0 and gamma_ > 0):
        raise ValueError("C and gamma must be positive")
    return C * gamma(gamma_ + 1) * n / (n - 1) ** (gamma_ + 1) + (1.0 - delta) ** n


def beta_tail_constants(slab: BetaParams, delta: float) -> tuple[float, float]:
    """``(C, gamma)`` with ``P(S >= 1-u) <= C u^gamma`` on ``(0, delta]`` for a Beta slab."""
    a, b = slab.alpha, slab.beta
    peak = 1.0 if a >= 1 else (1.0 - delta) ** (a - 1)
    return peak / (b * math.exp(betaln(a, b))), b
