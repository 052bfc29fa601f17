import math

import numpy as np
import pytest

from basin_infer.harness import Cluster, OutcomeTally
from basin_infer.inference import (
    MfmPrior,
    empirical_bayes_calibrate,
    log_marginal_likelihood,
    simulate_mfm_counts,
    tally_counts,
)


def partition_loglik(alpha, k, counts):
    """Direct log-gamma evaluation, independent of the library's helpers."""
    m, n = len(counts), sum(counts)
    if k < m:
        return -math.inf
    a = alpha / k
    out = math.lgamma(k + 1) - math.lgamma(k - m + 1) + math.lgamma(alpha) - math.lgamma(alpha + n)
    return out + sum(math.lgamma(a + c) - math.lgamma(a) for c in counts)


def brute_marginal(count_sets, theta, alpha, k_max=200):
    total = 0.0
    for counts in count_sets:
        terms = [math.log(theta) + (k - 1) * math.log1p(-theta) + partition_loglik(alpha, k, counts)
                 for k in range(1, k_max + 1)]
        top = max(terms)
        total += top + math.log(sum(math.exp(t - top) for t in terms))
    return total


THETAS = [0.2, 0.5, 0.8]
ALPHAS = [0.25, 0.5, 1.0, 2.0, 4.0]


def test_surface_matches_brute_force():
    data = [[10], [5, 5]]
    res = empirical_bayes_calibrate(data, THETAS, ALPHAS)
    for i, th in enumerate(THETAS):
        for j, al in enumerate(ALPHAS):
            assert res.loglik[i, j] == pytest.approx(brute_marginal(data, th, al), rel=1e-10)
    i, j = np.unravel_index(np.argmax(res.loglik), res.loglik.shape)
    assert (res.theta_hat, res.alpha_hat) == (THETAS[i], ALPHAS[j])


def test_unanimous_data_favours_mass_on_one():
    res = empirical_bayes_calibrate([[5000]], [0.1, 0.3, 0.5, 0.7, 0.9], [0.5, 1.0, 2.0])
    assert np.all(np.diff(res.loglik, axis=0) > 0)
    assert res.theta_hat == 0.9


def test_truncation_tail_is_negligible():
    _, tail = log_marginal_likelihood([[30, 20], [50]], MfmPrior("geometric", 0.5, 1.0, 200))
    assert 0 <= tail < 1e-30


def test_tally_input_drops_graveyard():
    tally = OutcomeTally([Cluster(np.array([1.0]), 7), Cluster(np.array([-1.0]), 2)], 1, 10, 1e-6)
    assert tally_counts(tally) == [7, 2]
    res_t = empirical_bayes_calibrate([tally], THETAS, ALPHAS)
    res_c = empirical_bayes_calibrate([[7, 2]], THETAS, ALPHAS)
    np.testing.assert_array_equal(res_t.loglik, res_c.loglik)


def test_all_graveyard_rejected():
    with pytest.raises(ValueError):
        tally_counts(OutcomeTally([], 5, 5, 1e-6))


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        empirical_bayes_calibrate([], THETAS, ALPHAS)
    with pytest.raises(ValueError):
        empirical_bayes_calibrate([[3]], [], ALPHAS)


def test_simulated_counts_partition_n():
    rng = np.random.default_rng(0)
    prior = MfmPrior("geometric", 0.5, 0.3)
    for _ in range(200):
        c = simulate_mfm_counts(prior, 100, rng)
        assert sum(c) == 100 and min(c) >= 1


@pytest.mark.slow
def test_recovers_alpha_on_simulated_data():
    grid_a = [0.25, 0.5, 1.0, 2.0, 4.0]
    grid_t = [0.3, 0.5, 0.7]
    true = MfmPrior("geometric", 0.5, 1.0, 200)
    hits = 0
    for rep in range(20):
        rng = np.random.default_rng(1000 + rep)
        data = [simulate_mfm_counts(true, 100, rng) for _ in range(50)]
        res = empirical_bayes_calibrate(data, grid_t, grid_a)
        assert res.loglik.max() == res.loglik[grid_t.index(res.theta_hat), grid_a.index(res.alpha_hat)]
        hits += abs(grid_a.index(res.alpha_hat) - grid_a.index(1.0)) <= 1
    assert hits >= 16
