"""Random-restart harness: i.i.d. restarts, tolerance-based identification, tallies."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .dynamics import TerminalOutcome
from .geometry import ConvexDomain, InitialSampler, sample_initial

WORKERS_ENV = "BASIN_INFER_WORKERS"


@dataclass(frozen=True, eq=False)
class RestartRecord:
    index: int
    x0: np.ndarray
    outcome: TerminalOutcome

    def __eq__(self, other):
        if not isinstance(other, RestartRecord):
            return NotImplemented
        return (self.index == other.index and np.array_equal(self.x0, other.x0)
                and self.outcome == other.outcome)

    __hash__ = None

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "x0": self.x0.tolist(), "outcome": self.outcome.to_dict()}

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "RestartRecord":
        return cls(int(spec["index"]), np.asarray(spec["x0"], dtype=float),
                   TerminalOutcome.from_dict(spec["outcome"]))


@dataclass
class Cluster:
    representative: np.ndarray
    count: int = 1
    max_within_cluster_distance: float = 0.0
    max_residual: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {"representative": self.representative.tolist(), "count": self.count,
                "max_within_cluster_distance": self.max_within_cluster_distance,
                "max_residual": self.max_residual}


@dataclass
class OutcomeTally:
    clusters: list[Cluster]
    dagger_count: int
    n: int
    eps_obs: float
    dagger_reasons: dict[str, int] = field(default_factory=dict)

    @property
    def counts(self) -> list[int]:
        return [c.count for c in self.clusters]

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "eps_obs": self.eps_obs, "dagger_count": self.dagger_count,
                "dagger_reasons": dict(sorted(self.dagger_reasons.items())),
                "clusters": [c.to_dict() for c in self.clusters]}

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> "OutcomeTally":
        clusters = [Cluster(np.asarray(c["representative"], dtype=float), int(c["count"]),
                            float(c.get("max_within_cluster_distance", 0.0)),
                            float(c.get("max_residual", 0.0)))
                    for c in spec["clusters"]]
        tally = cls(clusters, int(spec["dagger_count"]), int(spec["n"]), float(spec["eps_obs"]),
                    {k: int(v) for k, v in spec.get("dagger_reasons", {}).items()})
        if sum(tally.counts) + tally.dagger_count != tally.n:
            raise ValueError("tally counts and dagger_count do not add up to n")
        return tally

    def to_csv(self) -> str:
        """One row per cluster: coordinates, count, fraction."""
        d = self.clusters[0].representative.size if self.clusters else 0
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i}" for i in range(d)] + ["count", "fraction"])
        for c in self.clusters:
            w.writerow([repr(float(v)) for v in c.representative] + [c.count, repr(c.count / self.n)])
        return buf.getvalue()


@dataclass(frozen=True)
class HnReport:
    holds: bool
    rts: np.ndarray | None
    n: int


def _run_chunk(solver, sampler, domain, indices):
    out = []
    for i in indices:
        x0 = sample_initial(sampler, domain, i)
        out.append(RestartRecord(i, x0, solver(x0)))
    return out


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(workers))


def run_restarts(solver, sampler: InitialSampler, domain: ConvexDomain, n: int,
                 base_seed: int | None = None, workers: int | None = None) -> list[RestartRecord]:
    """Run ``n`` restarts; record ``i`` uses draw ``i`` of the seeded sampler.

    With ``workers > 1`` the indices are split across a process pool; each
    chunk lands in its own slot so the output does not depend on scheduling.
    The solver must then be picklable.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if base_seed is not None:
        sampler = InitialSampler(sampler.kind, int(base_seed), sampler.lower, sampler.upper)
    workers = resolve_workers(workers)
    if workers == 1:
        return _run_chunk(solver, sampler, domain, range(n))
    chunks = [range(lo, min(lo + -(-n // workers), n)) for lo in range(0, n, -(-n // workers))]
    slots: list[list[RestartRecord] | None] = [None] * len(chunks)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_run_chunk, solver, sampler, domain, c): k for k, c in enumerate(chunks)}
        for fut, k in futures.items():
            slots[k] = fut.result()
    return [r for chunk in slots for r in chunk]


def identify_outcomes(records: Sequence[RestartRecord], eps_obs: float) -> OutcomeTally:
    """Greedy leader clustering of converged terminal points under the sup norm.

    A point joins the first cluster whose representative is within ``eps_obs``;
    otherwise it founds a new one. Graveyard outcomes are never merged.
    """
    if not eps_obs > 0:
        raise ValueError("eps_obs must be positive")
    clusters: list[Cluster] = []
    reps: list[np.ndarray] = []
    daggers = 0
    reasons: dict[str, int] = {}
    for rec in records:
        out = rec.outcome
        if not out.converged:
            daggers += 1
            reasons[out.reason] = reasons.get(out.reason, 0) + 1
            continue
        p = out.point
        for c, rep in zip(clusters, reps):
            dist = float(np.max(np.abs(p - rep)))
            if dist <= eps_obs:
                c.count += 1
                c.max_within_cluster_distance = max(c.max_within_cluster_distance, dist)
                c.max_residual = max(c.max_residual, out.residual)
                break
        else:
            clusters.append(Cluster(p.copy(), 1, 0.0, out.residual))
            reps.append(p)
    return OutcomeTally(clusters, daggers, len(records), float(eps_obs), reasons)


def check_hn(tally: OutcomeTally) -> HnReport:
    """Whether all ``n`` restarts landed on one identified terminal state."""
    if tally.n < 1:
        raise ValueError("tally is empty")
    holds = tally.dagger_count == 0 and len(tally.clusters) == 1 and tally.clusters[0].count == tally.n
    return HnReport(holds, tally.clusters[0].representative if holds else None, tally.n)


def empirical_basin_fractions(tally: OutcomeTally) -> list[tuple[np.ndarray, float]]:
    if tally.n < 1:
        raise ValueError("tally is empty")
    return [(c.representative, c.count / tally.n) for c in tally.clusters]


def default_eps_obs(domain: ConvexDomain) -> float:
    scale = domain.diameter if np.isfinite(domain.diameter) else 1.0
    return 1e-6 * scale
