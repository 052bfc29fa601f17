import csv
import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from basin_infer.tables import reemit_csv, sci_from_log10, table1, table2, table3, write_tables


def test_spot_cells():
    assert table1().cell(10000, "eps=1e-04").display == "0.6322"
    assert table2().cell(1000, "p=0.001").display == "0.501"
    assert table3().cell(100, "geometric:alpha=0.5").display == "0.825"


def test_complement_carried_in_log_space():
    c = table1().cell(10000, "eps=1e-01")
    assert c.value == 1.0
    assert c.log10_complement == pytest.approx(10001 * math.log10(0.9), abs=1e-9)
    assert c.display == "1-2.40e-458"


def test_exact_formulas():
    for c in table1().cells:
        eps = float(c.column.split("=")[1])
        assert c.value == pytest.approx(1 - (1 - eps) ** (c.n + 1), rel=1e-12)
    for c in table2().cells:
        p = float(c.column.split("=")[1])
        assert c.value == pytest.approx(p / (p + (1 - p) / (c.n + 1)), rel=1e-12)
    for c in table3().cells:
        fam, a = c.column.split(":alpha=")
        a = float(a)
        pi1 = 0.5 if fam == "geometric" else math.exp(-1) / (1 - math.exp(-1))
        assert c.value == pytest.approx(1 - (1 - pi1) / pi1 * 0.5 * ((1 + a) / (c.n + a)) ** (a / 2), rel=1e-12)


@pytest.mark.parametrize("l10,want", [(-4.6210, "2.39e-05"), (math.log10(9.995e-3), "1.00e-02"),
                                      (-457.62, "2.40e-458"), (0.0, "1.00e+00")])
def test_sci_from_log10(l10, want):
    assert sci_from_log10(l10) == want


@given(st.floats(-500, 0))
def test_sci_round_trip(l10):
    text = sci_from_log10(l10)
    mant, exp = text.split("e")
    assert 1 <= float(mant) < 10
    assert math.log10(float(mant)) + int(exp) == pytest.approx(l10, abs=3e-3)


def test_written_files_round_trip(tmp_path):
    paths = write_tables(tmp_path)
    assert sorted(p.name for p in paths) == ["table1.csv", "table1_values.csv", "table2.csv",
                                             "table2_values.csv", "table3.csv", "table3_values.csv"]
    for p in paths:
        text = p.read_text(encoding="utf-8")
        assert reemit_csv(text) == text


def test_wide_layout_shape(tmp_path):
    write_tables(tmp_path, ["3"])
    rows = list(csv.reader(io.StringIO((tmp_path / "table3.csv").read_text())))
    assert rows[0][0] == "n" and len(rows[0]) == 9
    assert [r[0] for r in rows[1:]] == ["10", "100", "1000", "10000"]


def test_values_layout_full_precision(tmp_path):
    write_tables(tmp_path, ["1"])
    rows = list(csv.DictReader(io.StringIO((tmp_path / "table1_values.csv").read_text())))
    assert len(rows) == 20
    row = [r for r in rows if r["n"] == "100" and r["column"] == "eps=1e-02"][0]
    assert float(row["value"]) == table1().cell(100, "eps=1e-02").value
    assert float(row["value"]) == pytest.approx(1 - 0.99 ** 101, rel=1e-14)
