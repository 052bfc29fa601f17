"""Empirical-Bayes calibration of the MFM hyperparameters over benchmark tallies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .mfm import GEOMETRIC, MfmPrior, log_partition_likelihood, log_partition_likelihood_sup


def tally_counts(tally) -> list[int]:
    """Converged-cluster counts of a tally; graveyard outcomes are not scored."""
    counts = [int(c) for c in tally.counts if c > 0]
    if not counts:
        raise ValueError("tally has no converged outcomes to score")
    return counts


@dataclass(frozen=True)
class CalibrationResult:
    theta_hat: float
    alpha_hat: float
    theta_grid: np.ndarray
    alpha_grid: np.ndarray
    loglik: np.ndarray  # shape (len(theta_grid), len(alpha_grid))
    tail_bound: np.ndarray  # bound on the likelihood mass dropped by truncation, same shape

    def to_dict(self) -> dict:
        return {"theta_hat": self.theta_hat, "alpha_hat": self.alpha_hat,
                "theta_grid": self.theta_grid.tolist(), "alpha_grid": self.alpha_grid.tolist(),
                "loglik": self.loglik.tolist(), "tail_bound": self.tail_bound.tolist()}


def log_marginal_likelihood(count_sets: Sequence[Sequence[int]], prior: MfmPrior) -> tuple[float, float]:
    """Sum over instances of log sum_k P_K(k) P(counts | k), truncated at ``k_max``.

    Also returns a bound on the relative likelihood mass omitted by truncation,
    summed over instances.
    """
    ks = np.arange(1, prior.k_max + 1)
    log_pk = prior.log_pmf(ks)
    tail_k = prior.tail_mass()
    total, tail = 0.0, 0.0
    for counts in count_sets:
        terms = log_pk + log_partition_likelihood(prior.alpha, ks, counts)
        ll = float(logsumexp(terms))
        total += ll
        if tail_k > 0:
            tail += tail_k * math.exp(log_partition_likelihood_sup(prior.alpha, prior.k_max + 1, counts) - ll)
    return total, tail


def empirical_bayes_calibrate(tallies, theta_grid, alpha_grid, family: str = GEOMETRIC,
                              k_max: int = 200) -> CalibrationResult:
    """Grid search for the (theta, alpha) maximizing the marginal likelihood.

    ``tallies`` may be OutcomeTally objects or plain count lists. Ties go to
    the first grid point in row-major order.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    if theta_grid.size == 0 or alpha_grid.size == 0:
        raise ValueError("grids must be non-empty")
    if len(tallies) == 0:
        raise ValueError("no tallies to calibrate on")
    count_sets = [list(t) if isinstance(t, (list, tuple)) else tally_counts(t) for t in tallies]
    for c in count_sets:
        if not c or min(c) < 1:
            raise ValueError("every instance needs at least one converged outcome")
    surface = np.empty((theta_grid.size, alpha_grid.size))
    tails = np.empty_like(surface)
    for i, th in enumerate(theta_grid):
        for j, al in enumerate(alpha_grid):
            prior = MfmPrior(family, float(th), float(al), k_max)
            surface[i, j], tails[i, j] = log_marginal_likelihood(count_sets, prior)
    i, j = np.unravel_index(int(np.argmax(surface)), surface.shape)
    return CalibrationResult(float(theta_grid[i]), float(alpha_grid[j]), theta_grid, alpha_grid,
                             surface, tails)


def simulate_mfm_counts(prior: MfmPrior, n: int, rng: np.random.Generator) -> list[int]:
    """Draw K, basin sizes and ``n`` labelled restarts; return the nonzero counts."""
    ks = np.arange(1, prior.k_max + 1)
    pk = prior.pmf_values(ks)
    k = int(rng.choice(ks, p=pk / pk.sum()))
    if k == 1:
        return [n]
    # Gamma draws normalized to Dirichlet; tiny shapes underflow in numpy's dirichlet
    g = rng.gamma(prior.alpha / k, size=k)
    if g.sum() == 0:
        g[rng.integers(k)] = 1.0
    counts = rng.multinomial(n, g / g.sum())
    return [int(c) for c in counts if c > 0]
