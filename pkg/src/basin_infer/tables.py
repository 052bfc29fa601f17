"""Numeric tables of posterior quantities for the Beta, spike-and-slab and MFM priors.

Complements of probabilities close to 1 are carried as base-10 logarithms so
that values like ``1 - 2.4e-458`` survive. Display strings follow a fixed
convention per table: four decimals for basin posteriors, three significant
digits for spike-and-slab posteriors, three decimals for the MFM lower
bounds, and ``1-m.mme-XX`` once the complement drops below 1e-3.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .inference import BetaParams, SpikeSlabPrior, basin_tail_log, mfm_K1_bounds, spike_slab_posterior
from .inference.mfm import GEOMETRIC, ZT_POISSON, MfmPrior, mfm_K1_upper_log

N_GRID = (10, 100, 1000, 10000)
EPS_GRID = (1e-4, 1e-3, 1e-2, 5e-2, 1e-1)
P_GRID = (1e-3, 1e-2, 1e-1, 0.5)
ALPHA_GRID = (0.1, 0.5, 1.0, 5.0)
PK_FAMILIES = ((GEOMETRIC, 0.5), (ZT_POISSON, 1.0))
COMPLEMENT_SWITCH = 1e-3
LN10 = math.log(10.0)


def sci_from_log10(log10_value: float, digits: int = 2) -> str:
    """Scientific notation ``m.mme-XX`` for a positive number given by its log10."""
    e = math.floor(log10_value)
    mant = round(10 ** (log10_value - e), digits)
    if mant >= 10:
        mant /= 10
        e += 1
    sign = "-" if e < 0 else "+"
    return f"{mant:.{digits}f}e{sign}{abs(e):02d}"


def _round_half_up(v: float, quantum: str) -> str:
    # trim float noise first so exact ties like 0.5005 round up
    return str(Decimal(f"{v:.12g}").quantize(Decimal(quantum), rounding=ROUND_HALF_UP))


def _display_near_one(log10_comp: float, decimals: int) -> str:
    if log10_comp < math.log10(COMPLEMENT_SWITCH):
        return "1-" + sci_from_log10(log10_comp)
    return _round_half_up(1 - 10 ** log10_comp, "1e-%d" % decimals)


def _display_sig3(v: float) -> str:
    """Three significant digits below 0.1, three decimals above."""
    d = Decimal(f"{v:.12g}")
    if d >= Decimal("0.1"):
        return _round_half_up(v, "1e-3")
    return _round_half_up(v, "1e%d" % (d.adjusted() - 2))


@dataclass(frozen=True)
class Cell:
    n: int
    column: str
    value: float
    log10_complement: float
    display: str

    @property
    def complement(self) -> float:
        return 10 ** self.log10_complement


@dataclass(frozen=True)
class Table:
    name: str
    caption: str
    columns: tuple[str, ...]
    cells: tuple[Cell, ...]

    def cell(self, n: int, column: str) -> Cell:
        for c in self.cells:
            if c.n == n and c.column == column:
                return c
        raise KeyError((n, column))

    def display_csv(self) -> str:
        """Wide layout: one row per ``n``, one column per parameter setting."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", *self.columns])
        for n in sorted({c.n for c in self.cells}):
            w.writerow([n, *(self.cell(n, col).display for col in self.columns)])
        return buf.getvalue()

    def values_csv(self) -> str:
        """Long layout with full-precision value and complement per cell."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "column", "value", "complement", "log10_complement", "display"])
        for c in self.cells:
            w.writerow([c.n, c.column, repr(c.value), sci_from_log10(c.log10_complement, 15),
                        repr(c.log10_complement), c.display])
        return buf.getvalue()


def _eps_label(eps: float) -> str:
    return f"eps={eps:.0e}"


def table1(n_grid=N_GRID, eps_grid=EPS_GRID, prior: BetaParams = BetaParams(1.0, 1.0)) -> Table:
    """Posterior probability that the observed basin has size at least ``1 - eps``."""
    cells = []
    for n in n_grid:
        for eps in eps_grid:
            log_tail = basin_tail_log(prior, n, eps)
            l10 = log_tail / LN10
            cells.append(Cell(n, _eps_label(eps), -math.expm1(log_tail), l10, _display_near_one(l10, 4)))
    return Table("table1", "P(basin >= 1 - eps | H_n), Beta prior",
                 tuple(_eps_label(e) for e in eps_grid), tuple(cells))


def table2(n_grid=N_GRID, p_grid=P_GRID) -> Table:
    """Posterior probability of a unique observable RTS under spike-and-slab with a uniform slab."""
    cells = []
    for n in n_grid:
        for p in p_grid:
            v = spike_slab_posterior(SpikeSlabPrior(p, BetaParams(1.0, 1.0)), n).exact_value
            # complement (1-p) m / (p + (1-p) m) with m = 1/(n+1)
            log_m = -math.log(n + 1)
            log_comp = math.log1p(-p) + log_m - math.log(p + (1 - p) * math.exp(log_m))
            cells.append(Cell(n, f"p={p:g}", v, log_comp / LN10, _display_sig3(v)))
    return Table("table2", "P(s = 1 | H_n), spike-and-slab prior with uniform slab",
                 tuple(f"p={p:g}" for p in p_grid), tuple(cells))


def table3(n_grid=N_GRID, alpha_grid=ALPHA_GRID, families=PK_FAMILIES) -> Table:
    """Lower bounds on P(K = 1 | H_n) from the rate-tight MFM bound."""
    cells, columns = [], []
    for fam, theta in families:
        for a in alpha_grid:
            columns.append(f"{fam}:alpha={a:g}")
    for n in n_grid:
        for fam, theta in families:
            prior = MfmPrior(fam, theta, 1.0)
            pi1, pi2 = (float(v) for v in prior.pmf_values([1, 2]))
            for a in alpha_grid:
                _, upper = mfm_K1_bounds(pi1, pi2, a, n)
                l10 = mfm_K1_upper_log(pi1, a, n) / LN10
                cells.append(Cell(n, f"{fam}:alpha={a:g}", max(0.0, 1.0 - upper), l10,
                                  _display_near_one(l10, 3)))
    return Table("table3", "Lower bounds on P(K = 1 | H_n)", tuple(columns), tuple(cells))


TABLES = {"1": table1, "2": table2, "3": table3}


def write_tables(out_dir, which=("1", "2", "3")) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key in which:
        t = TABLES[key]()
        for suffix, text in ((".csv", t.display_csv()), ("_values.csv", t.values_csv())):
            path = out_dir / f"{t.name}{suffix}"
            path.write_text(text, encoding="utf-8")
            written.append(path)
    return written


def reemit_csv(text: str) -> str:
    """Parse CSV text and write it back with the emitter's dialect."""
    rows = list(csv.reader(io.StringIO(text)))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()
