"""Monte Carlo and grid self-checks behind ``basin-infer validate``.

Each suite returns a plain dict with ``name``, ``passed``, ``seed`` and
suite-specific details. Reports are deterministic for a given seed; no
timings or timestamps are recorded.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from .dynamics import SolverConfig, make_gradient_flow, solver_from
from .geometry import ConvexDomain, InitialSampler
from .harness import identify_outcomes, run_restarts
from .inference import (
    MfmPrior,
    dirichlet_coarsen_params,
    mfm_component_likelihood,
    mfm_K1_bounds,
    mfm_Lk_bounds,
    mfm_posterior_K,
)
from .problems import DoubleWellGradient

KS_LEVEL = 0.01
SANDWICH_ALPHAS = (0.1, 0.5, 1.0, 5.0)
SANDWICH_KS = tuple(range(1, 11))
SANDWICH_NS = (1, 10, 100, 1000, 10000)


def conditioned_beta_bernoulli(n: int, reps: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of s ~ U(0,1) kept only when n Bernoulli(s) trials all succeed."""
    kept: list[np.ndarray] = []
    total = 0
    batch = max(reps * (n + 1) // 4, 10_000)
    while total < reps:
        s = rng.random(batch)
        hit = rng.binomial(n, s) == n
        kept.append(s[hit])
        total += int(hit.sum())
    return np.concatenate(kept)[:reps]


def suite_posterior_calibration(seed: int, ns=(5, 20), reps: int = 100_000) -> dict:
    rng = np.random.default_rng(seed)
    checks = []
    for n in ns:
        s = conditioned_beta_bernoulli(n, reps, rng)
        res = stats.kstest(s, stats.beta(n + 1, 1).cdf)
        checks.append({"n": n, "ks": float(res.statistic), "pvalue": float(res.pvalue)})
    return {"name": "posterior_calibration", "seed": seed, "checks": checks,
            "passed": all(c["pvalue"] > KS_LEVEL for c in checks)}


def suite_dirichlet_aggregation(seed: int, cases=((1.0, 2, 3), (2.0, 3, 2)),
                                samples: int = 100_000) -> dict:
    rng = np.random.default_rng(seed)
    checks = []
    for alpha, K, m in cases:
        fine, coarse = dirichlet_coarsen_params(alpha, K, m)
        g = rng.gamma(fine, size=(samples, m * K))
        block = g[:, :m].sum(axis=1) / g.sum(axis=1)
        res = stats.kstest(block, stats.beta(coarse, alpha - coarse).cdf)
        checks.append({"alpha": alpha, "K": K, "m": m, "ks": float(res.statistic),
                       "pvalue": float(res.pvalue)})
    return {"name": "dirichlet_aggregation", "seed": seed, "checks": checks,
            "passed": all(c["pvalue"] > KS_LEVEL for c in checks)}


def suite_sandwich(inject_bug: bool = False, rel_tol: float = 1e-12) -> dict:
    violations = []
    count = 0
    for a in SANDWICH_ALPHAS:
        for k in SANDWICH_KS:
            for n in SANDWICH_NS:
                exact = mfm_component_likelihood(a, k, n)
                if inject_bug:
                    exact *= 1.5  # negative control
                lo, hi = mfm_Lk_bounds(a, k, n)
                count += 1
                if exact < lo * (1 - rel_tol) or exact > hi * (1 + rel_tol):
                    violations.append({"alpha": a, "k": k, "n": n, "L": exact, "lower": lo, "upper": hi})
    return {"name": "sandwich", "seed": None, "checks": count, "violations": violations,
            "passed": not violations}


def suite_mfm_bracket(k_max: int = 200) -> dict:
    violations = []
    count = 0
    for fam, theta in (("geometric", 0.5), ("zt_poisson", 1.0)):
        for a in SANDWICH_ALPHAS:
            prior = MfmPrior(fam, theta, a, k_max)
            pi1, pi2 = (float(v) for v in prior.pmf_values([1, 2]))
            for n in SANDWICH_NS:
                post = mfm_posterior_K(prior, n)
                comp = 1.0 - post.p_unique
                lo, hi = mfm_K1_bounds(pi1, pi2, a, n)
                count += 1
                if not lo <= comp <= hi + post.tail_bound:
                    violations.append({"family": fam, "alpha": a, "n": n, "complement": comp,
                                       "lower": lo, "upper": hi})
    return {"name": "mfm_bracket", "seed": None, "checks": count, "violations": violations,
            "passed": not violations}


def suite_double_well(seed: int, n: int = 2000) -> dict:
    domain = ConvexDomain.box([-2.0], [2.0])
    cfg = SolverConfig(h=0.05, residual_tol=1e-8)
    solver = solver_from(domain, make_gradient_flow(DoubleWellGradient()), cfg)
    tally = identify_outcomes(run_restarts(solver, InitialSampler(seed=seed), domain, n), 4e-6)
    reps = sorted(float(c.representative[0]) for c in tally.clusters)
    band = 3 * np.sqrt(n * 0.25)
    ok = (len(tally.clusters) == 2 and tally.dagger_count == 0
          and abs(reps[0] + 1) <= 1e-6 and abs(reps[1] - 1) <= 1e-6
          and all(abs(c.count - n / 2) <= band for c in tally.clusters)
          and all(c.max_residual <= cfg.residual_tol for c in tally.clusters))
    return {"name": "double_well", "seed": seed, "n": n, "representatives": reps,
            "counts": tally.counts, "passed": bool(ok)}


def run_validation(seed: int = 0, inject_bug: bool = False) -> dict:
    suites = [
        suite_posterior_calibration(seed),
        suite_dirichlet_aggregation(seed + 1),
        suite_sandwich(inject_bug=inject_bug),
        suite_mfm_bracket(),
        suite_double_well(seed + 2),
    ]
    return {"seed": seed, "suites": suites, "passed": all(s["passed"] for s in suites)}
