"""Vector fields and the projected explicit Euler integrator.

A run starting at ``x0`` iterates ``x <- project(x + h * Q(x))`` until the
tangent-cone projected residual stays below ``residual_tol`` for
``stall_window`` consecutive steps, or ends in the graveyard state.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from .geometry import (
    BOUNDARY_ATOL,
    ConvexDomain,
    DomainError,
    _as_point,
    contains,
    tangent_cone_project,
)

GRADIENT_FLOW = "gradient_flow"
PICARD_FLOW = "picard_flow"
RAW = "raw"

# reasons for the graveyard outcome
MAX_STEPS = "max_steps"
BLOWUP = "blowup"
NON_FINITE = "non_finite"


class _NegatedGradient:
    def __init__(self, grad_f):
        self.grad_f = grad_f

    def __call__(self, x):
        return -np.asarray(self.grad_f(x), dtype=float)


class _FixedPointResidual:
    def __init__(self, F):
        self.F = F

    def __call__(self, x):
        return np.asarray(self.F(x), dtype=float) - x


@dataclass(frozen=True)
class VectorFieldSpec:
    """The field Q evaluated by the integrator.

    ``eval`` must be reentrant; it is called from worker processes when
    restarts fan out, so it should also be picklable.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    kind: str = RAW
    source: str = ""

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.eval(x), dtype=float).reshape(np.shape(x))


def make_gradient_flow(grad_f, source: str = "") -> VectorFieldSpec:
    """Gradient flow of ``f``: Q(x) = -grad f(x)."""
    return VectorFieldSpec(_NegatedGradient(grad_f), GRADIENT_FLOW, source)


def make_picard_flow(F, source: str = "") -> VectorFieldSpec:
    """Picard flow of the map ``F``: Q(x) = F(x) - x."""
    return VectorFieldSpec(_FixedPointResidual(F), PICARD_FLOW, source)


@dataclass(frozen=True)
class SolverConfig:
    h: float = 1e-2
    residual_tol: float = 1e-8
    stall_window: int = 10
    max_steps: int = 1_000_000
    blowup_norm: float = 1e9

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step size h must be positive")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if self.stall_window < 1 or self.max_steps < 1:
            raise ValueError("stall_window and max_steps must be >= 1")
        if not self.blowup_norm > 0:
            raise ValueError("blowup_norm must be positive")

    @classmethod
    def for_domain(cls, domain: ConvexDomain, **overrides) -> "SolverConfig":
        scale = domain.diameter if np.isfinite(domain.diameter) else 1.0
        return cls(**{"h": 1e-2 * scale, **overrides})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "SolverConfig":
        known = {"h", "residual_tol", "stall_window", "max_steps", "blowup_norm"}
        unknown = set(spec) - known
        if unknown:
            raise ValueError(f"unknown solver config keys: {sorted(unknown)}")
        kwargs = dict(spec)
        for k in ("stall_window", "max_steps"):
            if k in kwargs:
                kwargs[k] = int(kwargs[k])
        return cls(**kwargs)


@dataclass(frozen=True)
class TerminalOutcome:
    """Converged terminal point, or the graveyard state with a reason."""

    converged: bool
    point: np.ndarray | None = field(default=None, compare=False)
    residual: float | None = None
    steps: int = 0
    reason: str | None = None

    def __eq__(self, other):
        if not isinstance(other, TerminalOutcome):
            return NotImplemented
        same_point = (self.point is None and other.point is None) or (
            self.point is not None and other.point is not None
            and np.array_equal(self.point, other.point)
        )
        return (same_point and self.converged == other.converged and self.residual == other.residual
                and self.steps == other.steps and self.reason == other.reason)

    __hash__ = None

    @property
    def is_dagger(self) -> bool:
        return not self.converged

    def to_dict(self) -> dict[str, Any]:
        if self.converged:
            return {"status": "converged", "point": self.point.tolist(),
                    "residual": self.residual, "steps": self.steps}
        return {"status": "dagger", "reason": self.reason, "steps": self.steps}

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "TerminalOutcome":
        if spec["status"] == "converged":
            return cls(True, np.asarray(spec["point"], dtype=float),
                       float(spec["residual"]), int(spec.get("steps", 0)))
        return cls(False, None, None, int(spec.get("steps", 0)), spec["reason"])


def projected_residual(domain: ConvexDomain, field: VectorFieldSpec, x) -> float:
    """Norm of the tangent-cone projected field at ``x``; zero exactly at its roots."""
    x = _as_point(x, domain.d)
    return float(np.linalg.norm(tangent_cone_project(domain, x, field(x))))


def _stepper(domain: ConvexDomain):
    """Unchecked (projection, residual) pair for the integrator's hot loop.

    Same arithmetic as ``project`` and ``tangent_cone_project`` minus the
    argument validation.
    """
    if domain.kind == "box":
        lo, hi = domain.lower, domain.upper
        lo_tol, hi_tol = lo + BOUNDARY_ATOL, hi - BOUNDARY_ATOL

        def proj(y):
            return np.minimum(np.maximum(y, lo), hi)

        def resid(x, q):
            w = np.where(((x <= lo_tol) & (q < 0)) | ((x >= hi_tol) & (q > 0)), 0.0, q)
            return math.sqrt(float(np.dot(w, w)))
        return proj, resid

    if domain.kind == "ball":
        c, r = domain.center, domain.radius

        def proj(y):
            off = y - c
            dist = math.sqrt(float(np.dot(off, off)))
            return y if dist <= r else c + off * (r / dist)

        def resid(x, q):
            off = x - c
            dist = math.sqrt(float(np.dot(off, off)))
            if dist < r * (1 - 1e-12):
                return math.sqrt(float(np.dot(q, q)))
            n = off / dist
            w = q - max(float(np.dot(q, n)), 0.0) * n
            return math.sqrt(float(np.dot(w, w)))
        return proj, resid

    return (lambda y: y), (lambda x, q: math.sqrt(float(np.dot(q, q))))


def integrate(domain: ConvexDomain, field: VectorFieldSpec, x0, cfg: SolverConfig,
              debug: bool = False) -> TerminalOutcome:
    x = _as_point(x0, domain.d)
    if not contains(domain, x):
        raise DomainError(f"initial point {x.tolist()} is outside the domain")
    proj, resid = _stepper(domain)
    f = field.eval
    h, tol, blow = cfg.h, cfg.residual_tol, cfg.blowup_norm
    below = 0
    for step in range(cfg.max_steps + 1):
        q = np.asarray(f(x), dtype=float).reshape(x.shape)
        if not np.all(np.isfinite(q)):
            return TerminalOutcome(False, steps=step, reason=NON_FINITE)
        res = resid(x, q)
        if res <= tol:
            below += 1
            if below >= cfg.stall_window:
                return TerminalOutcome(True, x, res, step)
        else:
            below = 0
        if step == cfg.max_steps:
            break
        y = x + h * q
        if not np.all(np.isfinite(y)):
            return TerminalOutcome(False, steps=step + 1, reason=NON_FINITE)
        x = proj(y)
        if math.sqrt(float(np.dot(x, x))) > blow:
            return TerminalOutcome(False, steps=step + 1, reason=BLOWUP)
        if debug:
            assert contains(domain, x), "iterate left the domain"
    return TerminalOutcome(False, steps=cfg.max_steps, reason=MAX_STEPS)


@dataclass(frozen=True)
class Solver:
    """The terminal-outcome map for a fixed domain, field and config."""

    domain: ConvexDomain
    field: VectorFieldSpec
    cfg: SolverConfig

    def __call__(self, x0) -> TerminalOutcome:
        return integrate(self.domain, self.field, x0, self.cfg)


def solver_from(domain: ConvexDomain, field: VectorFieldSpec, cfg: SolverConfig) -> Solver:
    return Solver(domain, field, cfg)
