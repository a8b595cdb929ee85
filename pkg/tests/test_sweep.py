import csv
import math

import numpy as np
import pytest

from oracles import re_p_2pi
from sh3.errors import IndeterminateBranch, InvalidParameters, WrongClass
from sh3.spectrum import i4_length
from sh3.sweep import (
    GridSpec,
    cell_label,
    phase_diagram,
    radius_scan,
    thread_count,
    write_radius_scan_csv,
)

TWO_PI = 2 * math.pi
SMALL = GridSpec((0.0, 10.0, 11), (0.0, 2.0, 21))


def test_zero_b_row_is_continuous():
    d = phase_diagram(TWO_PI, SMALL)
    assert all(lab == "continuous" for s, b, lab in d.rows if b == 0.0)


def test_row_major_order():
    d = phase_diagram(TWO_PI, SMALL)
    assert [r[:2] for r in d.rows[:3]] == [(0.0, 0.0), (0.0, 0.1), (0.0, 0.2)]
    assert len(d.rows) == 11 * 21


def test_boundary_constants():
    d = phase_diagram(TWO_PI, GridSpec((0.0, 200.0, 3), (0.0, 2.0, 21)))
    b = dict(d.boundary)
    assert b[0.0] == pytest.approx(math.sqrt(27 / 38), abs=1e-6)
    assert b[200.0] == pytest.approx(math.sqrt(3) / 2, abs=1e-4)
    assert b[0.0] == pytest.approx(0.8430, abs=1e-4)


def test_boundary_residual():
    d = phase_diagram(TWO_PI, SMALL)
    assert len(d.boundary) == 11
    for s, b in d.boundary:
        assert abs(re_p_2pi(s, b)) <= 1e-6


def test_i4_diagram_runs():
    d = phase_diagram(i4_length(2), GridSpec((0.0, 10.0, 5), (0.0, 2.0, 9)))
    assert {lab for *_, lab in d.rows} <= {"continuous", "catastrophic", "mixed", "degenerate",
                                          "indeterminate"}
    assert d.rows[0][2] == "continuous"


def test_diagram_needs_hopf_class():
    with pytest.raises(WrongClass):
        phase_diagram(1.0, SMALL)


def test_degenerate_cells_are_labelled():
    assert cell_label(TWO_PI, 0.0, math.sqrt(27 / 38)) == "degenerate"


def test_indeterminate_cells_are_labelled(monkeypatch):
    import sh3.sweep

    def refuse(*args):
        raise IndeterminateBranch("no verdict")

    monkeypatch.setattr(sh3.sweep, "classify", refuse)
    assert cell_label(i4_length(2), 1.0, 1.0) == "indeterminate"


def test_mixed_cells_appear_for_double_pairs():
    assert cell_label(i4_length(2), 0.5, 0.75) == "mixed"


@pytest.mark.parametrize("bad", [((0, 1, 1), (0, 1, 2)), ((1, 0, 3), (0, 1, 2)),
                                 ((0, 1, 2.5), (0, 1, 2)), ((0, math.nan, 2), (0, 1, 2))])
def test_grid_validation(bad):
    with pytest.raises(InvalidParameters):
        GridSpec(*bad)


def test_byte_identical_output(tmp_path, monkeypatch):
    paths = []
    for i, threads in enumerate(("1", "4")):
        monkeypatch.setenv("SH3_THREADS", threads)
        d = phase_diagram(TWO_PI, SMALL)
        p, q = tmp_path / f"p{i}.csv", tmp_path / f"b{i}.csv"
        d.write_csv(p)
        d.write_boundary_csv(q)
        paths.append((p.read_bytes(), q.read_bytes()))
    assert paths[0] == paths[1]
    assert paths[0][0].startswith(b"sigma,b,class\n")
    assert paths[0][1].startswith(b"sigma,b_critical\n")


def test_thread_count_env():
    assert thread_count({"SH3_THREADS": "3"}) == 3
    assert thread_count({}) >= 1
    for bad in ("0", "x"):
        with pytest.raises(InvalidParameters):
            thread_count({"SH3_THREADS": bad})


def test_radius_scan_approaches_analytic_law():
    lams = np.geomspace(1e-4, 1e-2, 5)
    rows = radius_scan(TWO_PI, 6.0, 0.86, lams)
    ratios = [r.radius_numeric / r.radius_analytic for r in rows]
    assert all(abs(q - 1) < 0.02 for q in ratios)


def test_radius_scan_at_criticality():
    (row,) = radius_scan(TWO_PI, 6.0, 0.86, [0.0])
    assert (row.radius_numeric, row.radius_analytic) == (0.0, 0.0)


def test_radius_scan_marks_failures():
    (row,) = radius_scan(TWO_PI, 6.0, 0.86, [-0.01])
    assert math.isnan(row.radius_numeric) and math.isnan(row.radius_analytic)


def test_radius_scan_full_projection_records_radius():
    (row,) = radius_scan(TWO_PI, 2.6, 0.86, [0.01], method="planar-full")
    assert row.method == "planar-full"
    assert row.radius_numeric == pytest.approx(0.3566, abs=1e-3)


def test_radius_scan_csv(tmp_path):
    rows = radius_scan(TWO_PI, 6.0, 0.86, [0.0, 1e-3])
    path = tmp_path / "r.csv"
    write_radius_scan_csv(rows, path)
    parsed = list(csv.DictReader(open(path)))
    assert list(parsed[0]) == ["lambda", "radius_numeric", "radius_analytic", "method"]
    assert float(parsed[1]["radius_analytic"]) == rows[1].radius_analytic


def test_radius_scan_rejects_non_planar_method():
    with pytest.raises(InvalidParameters):
        radius_scan(TWO_PI, 6.0, 0.86, [0.01], method="real1d")
