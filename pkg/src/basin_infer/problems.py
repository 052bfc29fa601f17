"""Built-in vector fields addressable from run manifests.

Every field is a module-level callable class so restarts can fan out to
worker processes.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .dynamics import RAW, VectorFieldSpec, make_gradient_flow, make_picard_flow
from .geometry import ConvexDomain


class DoubleWellGradient:
    """Gradient of sum_i (x_i^2 - 1)^2."""

    def __call__(self, x):
        return 4.0 * x * (x * x - 1.0)


class QuadraticGradient:
    """Gradient of |x - center|^2 / 2."""

    def __init__(self, center):
        self.center = np.asarray(center, dtype=float)

    def __call__(self, x):
        return x - self.center


class Rotation:
    """Planar rotation (-x2, x1); has no terminal state off the origin."""

    def __call__(self, x):
        return np.array([-x[1], x[0]])


class AffineMap:
    """x -> A x + b."""

    def __init__(self, A, b):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.atleast_1d(np.asarray(b, dtype=float))

    def __call__(self, x):
        return self.A @ x + self.b


def build_field(problem: dict[str, Any], domain: ConvexDomain) -> VectorFieldSpec:
    kind = problem["kind"]
    if kind == "double_well":
        return make_gradient_flow(DoubleWellGradient(), source="double_well")
    if kind == "quadratic":
        center = problem.get("center", [0.0] * domain.d)
        return make_gradient_flow(QuadraticGradient(center), source="quadratic")
    if kind == "rotation":
        if domain.d != 2:
            raise ValueError("rotation field needs a 2-dimensional domain")
        return VectorFieldSpec(Rotation(), RAW, "rotation")
    if kind == "affine_picard":
        return make_picard_flow(AffineMap(problem["A"], problem["b"]), source="affine_picard")
    raise ValueError(f"unknown problem kind {kind!r}")
