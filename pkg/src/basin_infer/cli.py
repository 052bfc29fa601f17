"""Command-line entry point: ``basin-infer {solve,infer,tables,validate,calibrate}``."""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import sys
from pathlib import Path

from . import manifest as mf
from .blp import InteriorityError, MixedLogitModel, equilibrium_pipeline
from .dynamics import SolverConfig, solver_from
from .geometry import ConvexDomain, DomainError, InitialSampler
from .harness import (
    OutcomeTally,
    check_hn,
    default_eps_obs,
    identify_outcomes,
    resolve_workers,
    run_restarts,
)
from .inference import empirical_bayes_calibrate
from .problems import build_field
from .reports import DEFAULT_PRIORS, posterior_report
from .tables import TABLES, write_tables
from .validate import run_validation

log = logging.getLogger("basin_infer")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NOT_HN = 4


class NotHnError(RuntimeError):
    pass


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def run_manifest(doc: dict, workers: int | None = None) -> tuple[dict, OutcomeTally]:
    """Execute a validated manifest; returns (result document, tally)."""
    prob = doc["problem"]
    priors = doc.get("priors", DEFAULT_PRIORS)
    seed = int(doc.get("seed", 0))
    n = int(doc["n"])
    if prob["kind"] == "mixed_logit":
        model = MixedLogitModel.from_dict(prob["model"])
        cfg = SolverConfig.from_dict(doc["solver"]) if "solver" in doc else None
        res = equilibrium_pipeline(model, n, seed, cfg, doc.get("eps_obs"), priors,
                                   prob.get("margin_cap", 50.0), workers)
        body = res.to_dict()
        return body, res.tally

    domain = ConvexDomain.from_dict(doc["domain"])
    cfg = SolverConfig.from_dict(doc["solver"]) if "solver" in doc else SolverConfig.for_domain(domain)
    sampler = InitialSampler.from_dict({**doc.get("sampler", {}), "seed": seed})
    solver = solver_from(domain, build_field(prob, domain), cfg)
    records = run_restarts(solver, sampler, domain, n, workers=workers)
    tally = identify_outcomes(records, doc.get("eps_obs", default_eps_obs(domain)))
    for c in tally.clusters:
        assert c.max_residual <= cfg.residual_tol
    hn = check_hn(tally)
    body = {"holds_hn": hn.holds, "n": n, "tally": tally.to_dict(),
            "fractions": [c.count / n for c in tally.clusters],
            "posteriors": posterior_report(n, priors) if hn.holds else {}}
    return body, tally


def cmd_solve(args) -> int:
    doc = mf.load_manifest(args.config)
    doc = mf.apply_overrides(doc, seed=args.seed, n=args.n, eps_obs=args.eps_obs)
    out = Path(args.out)
    body, tally = run_manifest(doc, resolve_workers(args.workers))
    result = {"schema_version": mf.SCHEMA_VERSION, "manifest": doc, "result": body,
              "timestamp": _now()}
    _write(out / "result.json", mf.dumps(result))
    _write(out / "tally.json", mf.dumps(tally.to_dict()))
    _write(out / "tally.csv", tally.to_csv())
    _write(out / "manifest.json", mf.dumps(doc))
    print(f"{len(tally.clusters)} cluster(s), {tally.dagger_count} graveyard, "
          f"H_n {'holds' if body['holds_hn'] else 'fails'}; wrote {out}")
    return EXIT_OK


def _load_tally(path) -> OutcomeTally:
    doc = mf.read_json(path, "tally")
    if "result" in doc:
        doc = doc["result"]
    if "tally" in doc:
        doc = doc["tally"]
    try:
        return OutcomeTally.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise mf.ConfigError(f"tally: {path}: {exc}") from None


def cmd_infer(args) -> int:
    tally = _load_tally(args.tally)
    if args.prior:
        priors = mf.read_json(args.prior, "prior spec")
        mf.validate_priors(priors)
    else:
        priors = DEFAULT_PRIORS
    hn = check_hn(tally)
    if hn.holds:
        n, forced = tally.n, False
    elif args.force:
        if not tally.clusters:
            raise mf.ConfigError("tally has no converged outcomes")
        n, forced = max(tally.counts), True
        log.warning("tally does not satisfy H_n; conditioning on the dominant cluster's %d runs", n)
    else:
        raise NotHnError(f"tally has {len(tally.clusters)} cluster(s) and {tally.dagger_count} "
                         "graveyard outcome(s); the posteriors condition on all restarts agreeing. "
                         "Pass --force to condition on the dominant cluster only.")
    report = {"holds_hn": hn.holds, "forced": forced, **posterior_report(n, priors)}
    text = mf.dumps(report)
    if args.out:
        _write(Path(args.out) / "report.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_tables(args) -> int:
    which = ["1", "2", "3"] if args.which == "all" else [args.which]
    for path in write_tables(args.out, which):
        print(path)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = run_validation(args.seed if args.seed is not None else 0, inject_bug=args.inject_bug)
    text = mf.dumps(report)
    if args.out:
        _write(Path(args.out) / "validation.json", text)
    for s in report["suites"]:
        print(f"{'PASS' if s['passed'] else 'FAIL'}  {s['name']}")
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def _grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise mf.ConfigError(f"bad grid {text!r}; expected comma-separated numbers") from None


def cmd_calibrate(args) -> int:
    files = sorted(Path(args.tallies).glob("*.json"))
    if not files:
        raise mf.ConfigError(f"no tally JSON files in {args.tallies}")
    tallies = [_load_tally(f) for f in files]
    try:
        res = empirical_bayes_calibrate(tallies, _grid(args.theta_grid), _grid(args.alpha_grid),
                                        args.family, args.k_max)
    except ValueError as exc:
        raise mf.ConfigError(str(exc)) from None
    doc = {"family": args.family, "k_max": args.k_max, "files": [f.name for f in files],
           **res.to_dict()}
    text = mf.dumps(doc)
    if args.out:
        _write(Path(args.out) / "calibration.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="basin-infer",
                                description="Random-restart solvers with Bayesian basin inference.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run restarts from a manifest")
    s.add_argument("--config", required=True, help="run manifest (JSON)")
    s.add_argument("--seed", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--eps-obs", type=float)
    s.add_argument("--out", default="out")
    s.add_argument("--workers", type=int, help="worker processes (fallback: $BASIN_INFER_WORKERS)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("infer", help="posterior report for a tally")
    s.add_argument("tally", help="tally.json or result.json")
    s.add_argument("--prior", help="prior spec (JSON)")
    s.add_argument("--force", action="store_true", help="allow tallies where restarts disagree")
    s.add_argument("--out")
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("tables", help="write the posterior tables as CSV")
    s.add_argument("which", nargs="?", default="all", choices=["all", *TABLES])
    s.add_argument("--out", default="tables")
    s.set_defaults(func=cmd_tables)

    s = sub.add_parser("validate", help="run the Monte Carlo self-check suites")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.add_argument("--inject-bug", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("calibrate", help="empirical-Bayes (theta, alpha) over a directory of tallies")
    s.add_argument("tallies", help="directory of tally JSON files")
    s.add_argument("--family", default="geometric", choices=["geometric", "zt_poisson"])
    s.add_argument("--theta-grid", default="0.1,0.3,0.5,0.7,0.9")
    s.add_argument("--alpha-grid", default="0.1,0.25,0.5,1,2,4")
    s.add_argument("--k-max", type=int, default=200)
    s.add_argument("--out")
    s.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (mf.ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InteriorityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NotHnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_HN


if __name__ == "__main__":
    sys.exit(main())
