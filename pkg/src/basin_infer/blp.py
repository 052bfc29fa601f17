"""Bertrand-Nash pricing with simulated mixed-logit demand and multi-product firms.

Utility of good ``j`` for consumer draw ``r`` is ``delta_j - alpha_r p_j``; the
outside good has utility 0. Equilibrium candidates are fixed points of the
markup map ``p -> c + zeta(p)``, whose roots coincide with the firms' first
order conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dynamics import SolverConfig, make_picard_flow, solver_from
from .geometry import ConvexDomain, InitialSampler
from .harness import (
    OutcomeTally,
    check_hn,
    default_eps_obs,
    empirical_basin_fractions,
    identify_outcomes,
    run_restarts,
)
from .reports import posterior_report


class InteriorityError(RuntimeError):
    """An equilibrium sits on or near the upper face of the price box."""


@dataclass(frozen=True, eq=False)
class MixedLogitModel:
    delta: np.ndarray
    price_coefs: np.ndarray
    ownership: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        for name in ("delta", "price_coefs", "costs"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        O = np.atleast_2d(np.asarray(self.ownership, dtype=float))
        object.__setattr__(self, "ownership", O)
        J = self.delta.size
        if self.costs.shape != (J,) or O.shape != (J, J):
            raise ValueError("delta, costs and ownership dimensions disagree")
        if not np.array_equal(O, O.T) or not np.all(np.diag(O) == 1) or not np.all(np.isin(O, (0, 1))):
            raise ValueError("ownership must be a symmetric 0/1 matrix with unit diagonal")
        if not np.all(self.price_coefs > 0):
            raise ValueError("price coefficients must be positive")
        if not np.all(self.costs > 0):
            raise ValueError("marginal costs must be positive")
        if not (np.all(np.isfinite(self.delta)) and np.all(np.isfinite(self.price_coefs))):
            raise ValueError("model primitives must be finite")

    @property
    def J(self) -> int:
        return self.delta.size

    @property
    def R(self) -> int:
        return self.price_coefs.size

    def to_dict(self) -> dict[str, Any]:
        return {"J": self.J, "delta": self.delta.tolist(), "price_coefs": self.price_coefs.tolist(),
                "ownership": self.ownership.astype(int).tolist(), "costs": self.costs.tolist()}

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "MixedLogitModel":
        model = cls(spec["delta"], spec["price_coefs"], spec["ownership"], spec["costs"])
        if "J" in spec and int(spec["J"]) != model.J:
            raise ValueError(f"J={spec['J']} disagrees with len(delta)={model.J}")
        return model

    @classmethod
    def with_log_costs(cls, delta, price_coefs, ownership, theta) -> "MixedLogitModel":
        """Costs parametrized as ``exp(theta)``, handy for drawing instances."""
        return cls(delta, price_coefs, ownership, np.exp(np.asarray(theta, dtype=float)))


def _draw_shares(model: MixedLogitModel, p) -> tuple[np.ndarray, np.ndarray]:
    """Per-draw inside shares (R x J) and outside shares (R,)."""
    p = np.asarray(p, dtype=float).reshape(model.J)
    u = model.delta[None, :] - model.price_coefs[:, None] * p[None, :]
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite utilities")
    top = np.maximum(u.max(axis=1), 0.0)
    eu = np.exp(u - top[:, None])
    e0 = np.exp(-top)
    denom = e0 + eu.sum(axis=1)
    return eu / denom[:, None], e0 / denom


def shares(model: MixedLogitModel, p) -> tuple[np.ndarray, float]:
    s_r, s0_r = _draw_shares(model, p)
    return s_r.mean(axis=0), float(s0_r.mean())


def share_jacobian(model: MixedLogitModel, p) -> np.ndarray:
    """``J[j, l] = d s_j / d p_l``."""
    s_r, _ = _draw_shares(model, p)
    a = model.price_coefs[:, None]
    jac = (a * s_r).T @ s_r / model.R
    jac[np.diag_indices(model.J)] -= (a * s_r).mean(axis=0)
    return jac


def foc(model: MixedLogitModel, p) -> np.ndarray:
    """Stacked first-order conditions ``s + (O * J_s)^T (p - c)``."""
    p = np.asarray(p, dtype=float)
    s, _ = shares(model, p)
    return s + (model.ownership * share_jacobian(model, p)).T @ (p - model.costs)


def zeta(model: MixedLogitModel, p) -> np.ndarray:
    """Markup map: the share Jacobian splits as ``Lambda - Gamma`` with Lambda
    diagonal, and ``zeta = Lambda^-1 [(O * Gamma)^T (p - c) - s]``.

    ``p = c + zeta(p)`` holds exactly where the first-order conditions do.
    """
    p = np.asarray(p, dtype=float)
    s_r, _ = _draw_shares(model, p)
    a = model.price_coefs[:, None]
    lam = -(a * s_r).mean(axis=0)
    gam = -(a * s_r).T @ s_r / model.R
    s = s_r.mean(axis=0)
    if np.any(lam == 0):
        raise ZeroDivisionError("singular own-price term; shares vanished")
    return ((model.ownership * gam).T @ (p - model.costs) - s) / lam


@dataclass(frozen=True)
class MarkupMap:
    """``p -> c + zeta(p)``; a picklable callable for the restart harness."""

    model: MixedLogitModel

    def __call__(self, p):
        return self.model.costs + zeta(self.model, p)


def picard_field(model: MixedLogitModel):
    return make_picard_flow(MarkupMap(model), source="mixed_logit markup map")


def build_price_domain(model: MixedLogitModel, margin_cap: float = 50.0) -> ConvexDomain:
    """Price box from marginal cost up to cost plus ``margin_cap``."""
    if not margin_cap > 0:
        raise ValueError("margin_cap must be positive")
    return ConvexDomain.box(model.costs, model.costs + margin_cap)


def check_interior(domain: ConvexDomain, p, frac: float = 0.01) -> None:
    width = domain.upper - domain.lower
    if np.any(domain.upper - p < frac * width):
        raise InteriorityError(
            f"equilibrium {np.asarray(p).tolist()} is within {frac:.0%} of the price cap; "
            "increase margin_cap")


@dataclass
class EquilibriumResult:
    tally: OutcomeTally
    holds_hn: bool
    prices: list[np.ndarray]
    shares: list[np.ndarray]
    foc_residuals: list[float]
    fractions: list[float]
    posteriors: dict[str, Any] = field(default_factory=dict)

    @property
    def price(self) -> np.ndarray | None:
        return self.prices[0] if self.prices else None

    def to_dict(self) -> dict[str, Any]:
        return {"holds_hn": self.holds_hn, "n": self.tally.n,
                "equilibria": [{"price": p.tolist(), "shares": s.tolist(), "foc_residual": r,
                                "fraction": f}
                               for p, s, r, f in zip(self.prices, self.shares,
                                                     self.foc_residuals, self.fractions)],
                "tally": self.tally.to_dict(), "posteriors": self.posteriors}


def equilibrium_pipeline(model: MixedLogitModel, n_restarts: int, seed: int = 0,
                         cfg: SolverConfig | None = None, eps_obs: float | None = None,
                         priors: dict | None = None, margin_cap: float = 50.0,
                         workers: int | None = None) -> EquilibriumResult:
    """Random restarts of the markup Picard flow on the price box, then inference.

    Posteriors are attached only when every restart reached the same price
    vector; an all-graveyard run yields an empty equilibrium list.
    """
    domain = build_price_domain(model, margin_cap)
    cfg = cfg or SolverConfig(h=0.5, residual_tol=1e-10, max_steps=20_000)
    eps_obs = eps_obs if eps_obs is not None else default_eps_obs(domain)
    fld = picard_field(model)
    records = run_restarts(solver_from(domain, fld, cfg), InitialSampler("uniform_domain", seed),
                           domain, n_restarts, workers=workers)
    tally = identify_outcomes(records, eps_obs)
    hn = check_hn(tally)
    prices, sh, res, fracs = [], [], [], []
    for cluster, (rep, frac) in zip(tally.clusters, empirical_basin_fractions(tally)):
        # every reported terminal state must be a root of the projected field
        assert cluster.max_residual <= cfg.residual_tol
        check_interior(domain, rep)
        prices.append(rep)
        sh.append(shares(model, rep)[0])
        res.append(float(np.max(np.abs(foc(model, rep)))))
        fracs.append(frac)
    posts = posterior_report(tally.n, priors) if hn.holds else {}
    return EquilibriumResult(tally, hn.holds, prices, sh, res, fracs, posts)
