import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basin_infer.blp import (
    _draw_shares,
    InteriorityError,
    MarkupMap,
    MixedLogitModel,
    build_price_domain,
    equilibrium_pipeline,
    foc,
    share_jacobian,
    shares,
    zeta,
)
from basin_infer.geometry import ConvexDomain

MONOPOLY = MixedLogitModel([1.0], [1.0], [[1]], [1.0])
P_STAR = 2.278464542761074  # root of p = 2 + exp(1 - p)


def random_model(rng, J=None, R=None):
    J = J or int(rng.integers(1, 6))
    R = R or int(rng.integers(1, 51))
    firms = rng.integers(0, J, size=J)
    O = (firms[:, None] == firms[None, :]).astype(int)
    return MixedLogitModel(rng.normal(1.0, 1.0, J), rng.lognormal(0.0, 0.5, R), O, rng.uniform(0.5, 2.0, J))


class TestShares:
    def test_symmetric_logit(self):
        s, s0 = shares(MixedLogitModel([0.0], [1.0], [[1]], [1.0]), [0.0])
        assert s[0] == pytest.approx(0.5) and s0 == pytest.approx(0.5)

    def test_vanishing_at_high_price(self):
        m = MixedLogitModel([1.0, 1.0], [1.0, 2.0], np.eye(2), [1.0, 1.0])
        s, _ = shares(m, [1e3, 2.0])
        assert s[0] < 1e-300 and s[1] > 0.1

    def test_symmetric_products(self):
        m = MixedLogitModel([0.7, 0.7], [1.0, 3.0], np.eye(2), [1.0, 1.0])
        s, _ = shares(m, [2.0, 2.0])
        assert s[0] == s[1]

    def test_extreme_utilities_stable(self):
        m = MixedLogitModel([800.0, -800.0], [1.0], np.eye(2), [1.0, 1.0])
        s, s0 = shares(m, [1.0, 1.0])
        assert np.all(np.isfinite(s)) and s.sum() + s0 == pytest.approx(1.0)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1))
    def test_simplex(self, seed):
        rng = np.random.default_rng(seed)
        m = random_model(rng)
        p = m.costs + rng.uniform(0, 5, m.J)
        s, s0 = shares(m, p)
        assert np.all((s > 0) & (s < 1)) and 0 < s0 < 1
        assert abs(s.sum() + s0 - 1) <= 1e-12


class TestJacobian:
    def test_logit_derivative(self):
        m = MixedLogitModel([0.4], [1.7], [[1]], [1.0])
        s = shares(m, [1.3])[0][0]
        assert share_jacobian(m, [1.3])[0, 0] == pytest.approx(-1.7 * s * (1 - s), rel=1e-14)

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        m = random_model(rng)
        p = m.costs + rng.uniform(0.1, 3, m.J)
        h = 1e-5 * max(1.0, float(np.max(np.abs(p))))
        fd = np.column_stack([(shares(m, p + h * e)[0] - shares(m, p - h * e)[0]) / (2 * h)
                              for e in np.eye(m.J)])
        jac = share_jacobian(m, p)
        assert np.max(np.abs(jac - fd)) <= 1e-6 * np.max(np.abs(jac))
        assert np.all(np.diag(jac) < 0)


class TestZeta:
    def test_single_product_at_fixed_point(self):
        s = shares(MONOPOLY, [P_STAR])[0][0]
        z = zeta(MONOPOLY, [P_STAR])[0]
        assert z == pytest.approx(1 / (1 - s), rel=1e-12)
        assert z == pytest.approx(P_STAR - 1, rel=1e-12)

    @pytest.mark.parametrize("p", [1.2, 2.0, 3.5])
    def test_single_product_closed_form(self, p):
        s = shares(MONOPOLY, [p])[0][0]
        assert zeta(MONOPOLY, [p])[0] == pytest.approx(s * (p - 1) + 1, rel=1e-13)

    def test_symmetric_duopoly(self):
        m = MixedLogitModel([1.0, 1.0], [1.0, 2.0], np.eye(2), [1.0, 1.0])
        z = zeta(m, [2.3, 2.3])
        assert z[0] == pytest.approx(z[1], rel=1e-15)

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_foc_is_scaled_markup_gap(self, seed):
        # FOC(p) = Lambda (p - c - zeta(p)) with Lambda the negative own-price diagonal
        rng = np.random.default_rng(seed)
        m = random_model(rng)
        p = m.costs + rng.uniform(0.05, 4, m.J)
        s_r, _ = _draw_shares(m, p)
        lam = -(m.price_coefs[:, None] * s_r).mean(axis=0)
        gap = p - m.costs - zeta(m, p)
        np.testing.assert_allclose(foc(m, p), lam * gap, rtol=1e-9, atol=1e-12)

    def test_roots_coincide_on_monopoly(self):
        assert abs(foc(MONOPOLY, [P_STAR])[0]) <= 1e-12
        assert abs(MarkupMap(MONOPOLY)([P_STAR])[0] - P_STAR) <= 1e-12
        for dp in (-0.3, 0.3):
            p = [P_STAR + dp]
            gap = p[0] - MarkupMap(MONOPOLY)(p)[0]
            assert np.sign(foc(MONOPOLY, p)[0]) == -np.sign(gap) != 0


class TestDomain:
    def test_box(self):
        m = MixedLogitModel([1.0, 1.0], [1.0], np.eye(2), [1.0, 2.0])
        assert build_price_domain(m, 50) == ConvexDomain.box([1, 2], [51, 52])

    def test_bad_cap(self):
        with pytest.raises(ValueError):
            build_price_domain(MONOPOLY, 0)


class TestPipeline:
    def test_monopoly(self):
        res = equilibrium_pipeline(MONOPOLY, 50, seed=0)
        assert res.holds_hn and len(res.prices) == 1
        assert abs(res.price[0] - P_STAR) <= 1e-4
        assert res.foc_residuals[0] <= 1e-6
        assert res.price[0] < 51

    def test_cap_below_markup(self):
        with pytest.raises(InteriorityError):
            equilibrium_pipeline(MONOPOLY, 5, seed=0, margin_cap=1.0)

    def test_merger_raises_prices(self):
        base = dict(delta=[1.0, 1.0], price_coefs=[1.0, 0.5, 1.5], costs=[1.0, 1.0])
        sep = equilibrium_pipeline(MixedLogitModel(ownership=np.eye(2), **base), 10, seed=2)
        joint = equilibrium_pipeline(MixedLogitModel(ownership=np.ones((2, 2)), **base), 10, seed=2)
        assert np.all(joint.price > sep.price)
        assert sep.price[0] == pytest.approx(sep.price[1], rel=1e-8)

    def test_posteriors_attached(self):
        res = equilibrium_pipeline(MONOPOLY, 100, seed=1)
        row = [r for r in res.posteriors["basin_size"]["tails"] if r["eps"] == 1e-2][0]
        assert round(row["prob_basin_at_least_1_minus_eps"], 4) == 0.6376

    def test_bit_reproducible(self):
        a = equilibrium_pipeline(MONOPOLY, 10, seed=4).to_dict()
        b = equilibrium_pipeline(MONOPOLY, 10, seed=4).to_dict()
        assert a == b

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_foc_residual_at_every_cluster(self, seed):
        rng = np.random.default_rng(seed)
        m = random_model(rng, J=int(rng.integers(1, 4)), R=int(rng.integers(1, 20)))
        res = equilibrium_pipeline(m, 5, seed=seed % 1000)
        assert all(r <= 1e-6 for r in res.foc_residuals)


class TestModel:
    @pytest.mark.parametrize("kw", [
        {"ownership": [[1, 1], [0, 1]]},
        {"ownership": [[0, 0], [0, 0]]},
        {"price_coefs": [-1.0]},
        {"costs": [1.0]},
        {"costs": [0.0, 1.0]},
    ])
    def test_invalid(self, kw):
        spec = dict(delta=[1.0, 1.0], price_coefs=[1.0], ownership=np.eye(2), costs=[1.0, 1.0])
        spec.update(kw)
        with pytest.raises(ValueError):
            MixedLogitModel(**spec)

    def test_round_trip(self):
        m = random_model(np.random.default_rng(0), J=3, R=4)
        back = MixedLogitModel.from_dict(m.to_dict())
        assert back.to_dict() == m.to_dict()

    def test_log_costs(self):
        m = MixedLogitModel.with_log_costs([1.0], [1.0], [[1]], [0.5])
        assert m.costs[0] == pytest.approx(math.exp(0.5))
