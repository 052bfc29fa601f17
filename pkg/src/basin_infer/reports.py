"""Posterior reports for an observed run of ``n`` identical restart outcomes."""

from __future__ import annotations

import math
from typing import Any

from .inference import (
    BetaParams,
    MfmPrior,
    SpikeSlabPrior,
    basin_eta_bound,
    basin_tail_bound_beta,
    basin_tail_bound_poly,
    basin_tail_log,
    beta_posterior_update,
    beta_tail_constants,
    mfm_K1_bounds,
    mfm_posterior_K,
    moment_tail_bound,
    poly_params_for_beta,
    poly_tail_rate_bound,
    prior_mass_below,
    slab_near_one_cdf,
    spike_slab_posterior,
)

DEFAULT_EPS = (1e-4, 1e-3, 1e-2, 5e-2, 1e-1)
DEFAULT_PRIORS: dict[str, Any] = {
    "beta": {"alpha": 1.0, "beta": 1.0},
    "eps": list(DEFAULT_EPS),
    "spike_slab": {"p": 0.5, "slab": {"alpha": 1.0, "beta": 1.0}},
    "mfm": {"family": "geometric", "theta": 0.5, "alpha": 1.0, "k_max": 200},
}
# tail window used by the density-floor and moment bounds
BOUND_DELTA = 0.5


def _beta(spec) -> BetaParams:
    return BetaParams(float(spec.get("alpha", 1.0)), float(spec.get("beta", 1.0)))


def basin_report(prior: BetaParams, n: int, eps_list) -> dict[str, Any]:
    post = beta_posterior_update(prior, n)
    rows = []
    for eps in eps_list:
        log_tail = basin_tail_log(prior, n, eps)
        row = {
            "eps": eps,
            "posterior_tail": math.exp(log_tail),
            "log10_posterior_tail": log_tail / math.log(10) if log_tail > -math.inf else None,
            "prob_basin_at_least_1_minus_eps": -math.expm1(log_tail),
        }
        raw = basin_tail_bound_beta(prior, n, eps)
        row["bound_beta"] = min(1.0, raw)
        row["bound_beta_raw"] = raw
        eta = eps / 2
        mass_eta = prior_mass_below(prior, eta)
        if mass_eta < 1:
            mass_eps = prior_mass_below(prior, eps)
            row["bound_eta"] = basin_eta_bound(n, eps, eta, mass_eps, mass_eta)
            row["eta"] = eta
        if n >= 2 and 1.0 / n < BOUND_DELTA:
            poly = basin_tail_bound_poly(poly_params_for_beta(prior, BOUND_DELTA), n, eps,
                                         prior_mass_below(prior, eps))
            row["bound_poly"] = poly.bound
            row["bound_poly_exponential"] = poly.exponential_bound
        rows.append(row)
    return {"prior": {"alpha": prior.alpha, "beta": prior.beta},
            "posterior": {"alpha": post.alpha, "beta": post.beta}, "tails": rows}


def spike_slab_report(prior: SpikeSlabPrior, n: int) -> dict[str, Any]:
    summary = spike_slab_posterior(prior, n)
    out: dict[str, Any] = {"p_spike": prior.p_spike,
                           "slab": {"alpha": prior.slab.alpha, "beta": prior.slab.beta},
                           "posterior_unique": summary.exact_value}
    p = prior.p_spike
    if 0 < p < 1 and n >= 1:
        m = moment_tail_bound(slab_near_one_cdf(prior.slab), BOUND_DELTA, n)
        out["lower_bound_moment"] = p / (p + (1 - p) * m)
        if n >= 2:
            C, gam = beta_tail_constants(prior.slab, BOUND_DELTA)
            m2 = poly_tail_rate_bound(C, gam, BOUND_DELTA, n)
            out["lower_bound_poly_tail"] = p / (p + (1 - p) * m2)
    return out


def mfm_report(prior: MfmPrior, n: int, top: int = 10) -> dict[str, Any]:
    post = mfm_posterior_K(prior, n)
    out: dict[str, Any] = {"prior": prior.to_dict(), "p_K1": post.p_unique,
                           "truncation_tail_bound": post.tail_bound,
                           "posterior_K": {str(k + 1): float(v) for k, v in enumerate(post.probs[:top])}}
    pi1, pi2 = (float(v) for v in prior.pmf_values([1, 2]))
    if pi1 > 0 and pi2 > 0:
        lo, hi = mfm_K1_bounds(pi1, pi2, prior.alpha, n)
        out["complement_lower_bound"] = lo
        out["complement_upper_bound"] = hi
        out["p_K1_lower_bound"] = max(0.0, 1.0 - hi)
    return out


def posterior_report(n: int, priors: dict | None = None) -> dict[str, Any]:
    """Posterior summaries for every prior present in ``priors``."""
    priors = DEFAULT_PRIORS if priors is None else priors
    out: dict[str, Any] = {"n": n}
    if "beta" in priors:
        out["basin_size"] = basin_report(_beta(priors["beta"]), n, priors.get("eps", DEFAULT_EPS))
    if "spike_slab" in priors:
        spec = priors["spike_slab"]
        out["spike_slab"] = spike_slab_report(
            SpikeSlabPrior(float(spec["p"]), _beta(spec.get("slab", {}))), n)
    if "mfm" in priors:
        out["mfm"] = mfm_report(MfmPrior.from_dict(priors["mfm"]), n)
    return out
