"""Convex solution spaces, their boundary geometry and initial-condition samplers.

Three domain variants are supported: an axis-aligned box, a Euclidean ball and
the whole space. Every operation is a closed form that costs O(d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

# Points closer than this to a face are treated as lying on it.
BOUNDARY_ATOL = 1e-12


class DomainError(ValueError):
    """Raised for dimension mismatches and points outside the domain."""


def _as_point(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape != (d,):
        raise DomainError(f"expected a point of dimension {d}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("point has non-finite coordinates")
    return x


@dataclass(frozen=True, eq=False)
class ConvexDomain:
    """Closed convex set X in R^d.

    Use the :meth:`box`, :meth:`ball` and :meth:`whole` constructors rather than
    the raw initializer.
    """

    kind: str
    d: int
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float | None = None

    @classmethod
    def box(cls, lower, upper) -> "ConvexDomain":
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DomainError("box bounds must be vectors of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise DomainError("box bounds must be finite")
        if not np.all(lower < upper):
            raise DomainError("box needs lower < upper componentwise")
        lower.setflags(write=False)
        upper.setflags(write=False)
        return cls("box", lower.size, lower=lower, upper=upper)

    @classmethod
    def ball(cls, center, radius: float) -> "ConvexDomain":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise DomainError("ball center must be a finite vector")
        if not (np.isfinite(radius) and radius > 0):
            raise DomainError("ball radius must be positive")
        center.setflags(write=False)
        return cls("ball", center.size, center=center, radius=float(radius))

    @classmethod
    def whole(cls, d: int) -> "ConvexDomain":
        if d < 1:
            raise DomainError("dimension must be >= 1")
        return cls("all", int(d))

    @property
    def diameter(self) -> float:
        if self.kind == "box":
            return float(np.linalg.norm(self.upper - self.lower))
        if self.kind == "ball":
            return 2.0 * self.radius
        return float("inf")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexDomain):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(self.to_dict()))

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "box":
            return {"kind": "box", "dim": self.d,
                    "lower": self.lower.tolist(), "upper": self.upper.tolist()}
        if self.kind == "ball":
            return {"kind": "ball", "dim": self.d,
                    "center": self.center.tolist(), "radius": self.radius}
        return {"kind": "all", "dim": self.d}

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "ConvexDomain":
        kind = spec.get("kind")
        if kind == "box":
            dom = cls.box(spec["lower"], spec["upper"])
        elif kind == "ball":
            dom = cls.ball(spec["center"], spec["radius"])
        elif kind == "all":
            dom = cls.whole(int(spec["dim"]))
        else:
            raise DomainError(f"unknown domain kind {kind!r}")
        if "dim" in spec and int(spec["dim"]) != dom.d:
            raise DomainError(f"dim={spec['dim']} disagrees with bounds of dimension {dom.d}")
        return dom


def contains(domain: ConvexDomain, x) -> bool:
    """True iff ``x`` lies in the closed set X."""
    x = _as_point(x, domain.d)
    if domain.kind == "box":
        return bool(np.all(x >= domain.lower) and np.all(x <= domain.upper))
    if domain.kind == "ball":
        return bool(np.linalg.norm(x - domain.center) <= domain.radius * (1 + 1e-15))
    return True


def project(domain: ConvexDomain, x) -> np.ndarray:
    """Euclidean projection onto X."""
    x = _as_point(x, domain.d)
    if domain.kind == "box":
        return np.clip(x, domain.lower, domain.upper)
    if domain.kind == "ball":
        offset = x - domain.center
        r = np.linalg.norm(offset)
        if r <= domain.radius:
            return x
        return domain.center + offset * (domain.radius / r)
    return x


def _require_inside(domain: ConvexDomain, x: np.ndarray) -> None:
    if domain.kind == "box":
        ok = np.all(x >= domain.lower - BOUNDARY_ATOL) and np.all(x <= domain.upper + BOUNDARY_ATOL)
    elif domain.kind == "ball":
        ok = np.linalg.norm(x - domain.center) <= domain.radius * (1 + 1e-12)
    else:
        ok = True
    if not ok:
        raise DomainError(f"point {x.tolist()} is outside the domain")


def tangent_cone_project(domain: ConvexDomain, x, v) -> np.ndarray:
    """Project the velocity ``v`` onto the tangent cone of X at ``x``.

    In the interior this is the identity. On a box the polyhedral cone is used:
    outward components are zeroed at active faces, which also covers corners.
    On the sphere the outward normal component is removed when positive.
    """
    x = _as_point(x, domain.d)
    v = _as_point(v, domain.d)
    _require_inside(domain, x)
    if domain.kind == "box":
        at_lo = x <= domain.lower + BOUNDARY_ATOL
        at_hi = x >= domain.upper - BOUNDARY_ATOL
        w = v.copy()
        w[at_lo & (v < 0)] = 0.0
        w[at_hi & (v > 0)] = 0.0
        return w
    if domain.kind == "ball":
        offset = x - domain.center
        r = np.linalg.norm(offset)
        if r < domain.radius * (1 - 1e-12):
            return v
        n = offset / r
        return v - max(float(v @ n), 0.0) * n
    return v


def boundary_normal(domain: ConvexDomain, x) -> np.ndarray:
    """Outward unit normal at a smooth boundary point."""
    x = _as_point(x, domain.d)
    _require_inside(domain, x)
    if domain.kind == "ball":
        offset = x - domain.center
        r = np.linalg.norm(offset)
        if r < domain.radius * (1 - 1e-12):
            raise DomainError("point is not on the boundary")
        return offset / r
    if domain.kind == "box":
        at_lo = np.abs(x - domain.lower) <= BOUNDARY_ATOL
        at_hi = np.abs(x - domain.upper) <= BOUNDARY_ATOL
        active = np.flatnonzero(at_lo | at_hi)
        if active.size == 0:
            raise DomainError("point is not on the boundary")
        if active.size > 1:
            raise DomainError("no unique normal at a box corner or edge; use tangent_cone_project")
        n = np.zeros(domain.d)
        i = active[0]
        n[i] = -1.0 if at_lo[i] else 1.0
        return n
    raise DomainError("the whole space has no boundary")


@dataclass(frozen=True)
class InitialSampler:
    """Distribution of restart points.

    ``kind`` is ``"uniform_domain"`` (uniform on X) or ``"uniform_box"``
    (uniform on the sub-box ``[lower, upper]``, which must lie inside X).
    Draw ``k`` under seed ``s`` is a pure function of ``(s, k)``.
    """

    kind: str = "uniform_domain"
    seed: int = 0
    lower: tuple | None = None
    upper: tuple | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "seed": self.seed}
        if self.kind == "uniform_box":
            out["lower"] = list(self.lower)
            out["upper"] = list(self.upper)
        return out

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "InitialSampler":
        kind = spec.get("kind", "uniform_domain")
        if kind == "uniform_box":
            return cls(kind, int(spec.get("seed", 0)),
                       tuple(float(v) for v in spec["lower"]),
                       tuple(float(v) for v in spec["upper"]))
        if kind != "uniform_domain":
            raise DomainError(f"unknown sampler kind {kind!r}")
        return cls(kind, int(spec.get("seed", 0)))


def draw_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator addressed by ``(seed, index)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _support_box(sampler: InitialSampler, domain: ConvexDomain):
    lo = np.asarray(sampler.lower, dtype=float)
    hi = np.asarray(sampler.upper, dtype=float)
    if lo.shape != (domain.d,) or hi.shape != (domain.d,):
        raise DomainError("sampler box dimension does not match the domain")
    if not np.all(lo < hi):
        raise DomainError("sampler box needs lower < upper (positive-measure support)")
    corners_ok = domain.kind == "all" or (
        domain.kind == "box" and np.all(lo >= domain.lower) and np.all(hi <= domain.upper)
    ) or (
        domain.kind == "ball"
        and np.linalg.norm(np.maximum(np.abs(lo - domain.center), np.abs(hi - domain.center)))
        <= domain.radius
    )
    if not corners_ok:
        raise DomainError("sampler box is not contained in the domain")
    return lo, hi


def _uniform(sampler: InitialSampler, domain: ConvexDomain, rng: np.random.Generator, size: int):
    if sampler.kind == "uniform_box":
        lo, hi = _support_box(sampler, domain)
        return lo + (hi - lo) * rng.random((size, domain.d))
    if domain.kind == "box":
        return domain.lower + (domain.upper - domain.lower) * rng.random((size, domain.d))
    if domain.kind == "ball":
        g = rng.standard_normal((size, domain.d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = domain.radius * rng.random(size) ** (1.0 / domain.d)
        return domain.center + g * r[:, None]
    raise DomainError("uniform_domain needs a bounded domain; use a uniform_box sampler")


def sample_initial(sampler: InitialSampler, domain: ConvexDomain, index: int = 0) -> np.ndarray:
    """Draw number ``index`` from the sampler."""
    return _uniform(sampler, domain, draw_rng(sampler.seed, index), 1)[0]


def sample_many(sampler: InitialSampler, domain: ConvexDomain, n: int) -> np.ndarray:
    """Bulk i.i.d. draws from one stream; not index-addressed, for statistics only."""
    return _uniform(sampler, domain, np.random.default_rng(sampler.seed), n)
