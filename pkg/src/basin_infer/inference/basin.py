"""Posterior on the basin size of an RTS observed in all ``n`` restarts.

``A_eps`` denotes the event that the basin is smaller than ``1 - eps``; the
functions below return its posterior probability or upper bounds on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.special import betainc, betaln, gammaln


@dataclass(frozen=True)
class BetaParams:
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("Beta parameters must be positive")


@dataclass(frozen=True)
class PolyDensityParams:
    """Prior density bounded below by ``c (1 - s)**kappa`` on ``(1 - delta, 1)``.

    ``delta = 1`` is accepted: the uniform prior satisfies the bound on the
    whole unit interval.
    """

    c: float
    kappa: float
    delta: float

    def __post_init__(self):
        if not (self.c > 0 and self.kappa >= 0 and 0 < self.delta <= 1):
            raise ValueError("need c > 0, kappa >= 0 and 0 < delta <= 1")


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")


def beta_posterior_update(prior: BetaParams, n: int) -> BetaParams:
    if n < 0:
        raise ValueError("n must be >= 0")
    return BetaParams(prior.alpha + n, prior.beta)


def prior_mass_below(prior: BetaParams, eps: float) -> float:
    """Prior probability of ``A_eps`` under a Beta prior."""
    _check_eps(eps)
    return float(betainc(prior.alpha, prior.beta, 1.0 - eps))


def basin_tail_log(prior: BetaParams, n: int, eps: float) -> float:
    """Natural log of the posterior probability of ``A_eps``.

    Exact in log space for ``beta == 1`` so that tails like 1e-458 survive.
    """
    _check_eps(eps)
    post = beta_posterior_update(prior, n)
    if post.beta == 1.0:
        return post.alpha * math.log1p(-eps)
    val = float(betainc(post.alpha, post.beta, 1.0 - eps))
    return math.log(val) if val > 0 else -math.inf


def basin_tail_exact(prior: BetaParams, n: int, eps: float) -> float:
    """Posterior probability of ``A_eps``: the regularized incomplete Beta I_{1-eps}(a+n, b)."""
    _check_eps(eps)
    post = beta_posterior_update(prior, n)
    if post.beta == 1.0:
        return math.exp(post.alpha * math.log1p(-eps))
    return float(betainc(post.alpha, post.beta, 1.0 - eps))


def basin_tail_bound_beta(prior: BetaParams, n: int, eps: float) -> float:
    """Closed-form exponential bound for a Beta prior; may exceed 1 for small ``n``."""
    _check_eps(eps)
    a, b = prior.alpha, prior.beta
    log_bound = b * math.log(a + n + b) - gammaln(b + 1) + (a + n - 1) * math.log1p(-eps)
    return math.exp(log_bound)


def basin_eta_bound(n: int, eps: float, eta: float, prior_mass_Aeps: float,
                    prior_mass_Aeta: float, clamp: bool = True) -> float:
    """Bound through an auxiliary level ``eta``, valid for any prior.

    ``(1-eps)^n P(A_eps) / ((1-eta)^n (1 - P(A_eta)))``, capped at 1 unless
    ``clamp`` is false.
    """
    _check_eps(eps)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if not prior_mass_Aeta < 1:
        raise ValueError("prior mass of A_eta must be < 1")
    if prior_mass_Aeps <= 0:
        return 0.0
    log_val = (n * (math.log1p(-eps) - math.log1p(-eta)) + math.log(prior_mass_Aeps)
               - math.log1p(-prior_mass_Aeta))
    val = math.exp(min(log_val, 700.0))
    return min(1.0, val) if clamp else val


class PolyTailBound(NamedTuple):
    bound: float
    exponential_bound: float
    raw: float
    raw_exponential: float


def basin_tail_bound_poly(params: PolyDensityParams, n: int, eps: float,
                          prior_mass_Aeps: float) -> PolyTailBound:
    """Bound free of ``eta`` for priors with a polynomial density floor near 1.

    Returns the ``(1-eps)^n`` form and the weaker ``exp(-n eps)`` form, each
    capped at 1, together with the uncapped values.
    """
    _check_eps(eps)
    if n < 2 or not 1.0 / n < params.delta:
        raise ValueError("need n >= 2 and 1/n < delta")
    const = 4.0 * (params.kappa + 1) / params.c * n ** (params.kappa + 1) * prior_mass_Aeps
    raw = const * math.exp(n * math.log1p(-eps))
    raw_exp = const * math.exp(-n * eps)
    return PolyTailBound(min(1.0, raw), min(1.0, raw_exp), raw, raw_exp)


def poly_params_for_beta(prior: BetaParams, delta: float = 0.5) -> PolyDensityParams:
    """Polynomial floor for a Beta density on ``(1 - delta, 1)``.

    With ``kappa = max(beta - 1, 0)``, ``s**(a-1)`` is at least
    ``min(1, (1-delta)**(a-1))`` there and ``(1-s)**(b-1-kappa) >= 1``.
    """
    a, b = prior.alpha, prior.beta
    kappa = max(b - 1.0, 0.0)
    log_c = -betaln(a, b)
    if a > 1:
        if delta >= 1:
            raise ValueError("density floor vanishes at s = 0; use delta < 1")
        log_c += (a - 1) * math.log1p(-delta)
    return PolyDensityParams(math.exp(log_c), kappa, delta)
