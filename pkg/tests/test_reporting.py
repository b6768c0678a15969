import numpy as np
import pytest
from hypothesis import given, strategies as st

from swarmsense.epos import EposConfig, build_tree, rss, run_epos
from swarmsense.errors import InvalidRequirementsError, InvalidRunError
from swarmsense.missionsim import execute_mission
from swarmsense.plangen import generate_all
from swarmsense.reporting import (TABLE_COLUMNS, emit_table, emit_trip_series,
                                  mission_inefficiency, parse_table, parse_trip_series,
                                  summarize)


def test_inefficiency_examples():
    assert mission_inefficiency([60, 70], [60, 60]) == 0
    assert mission_inefficiency([0, 0], [60, 60]) == 1
    assert mission_inefficiency([60, 30], [60, 60]) == 0.25
    with pytest.raises(InvalidRequirementsError):
        mission_inefficiency([1, 1], [0, 0])


@given(st.lists(st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=1, max_size=20),
       st.integers(0, 19), st.floats(0, 50))
def test_inefficiency_monotone(pairs, i, bump):
    r = np.array([p[0] for p in pairs])
    g = np.array([p[1] for p in pairs])
    if r.sum() <= 0:
        return
    before = mission_inefficiency(g, r)
    g2 = g.copy()
    g2[i % g.size] += bump
    assert mission_inefficiency(g2, r) <= before
    assert 0 <= before <= 1
    assert (before == 0) == bool(np.all(g >= r))


@pytest.fixture(scope="module")
def report(paper_map, paper_req, model, spec):
    ps = generate_all(10, 16, paper_map, paper_req, model, spec, seed=4)
    sel = run_epos(ps, paper_req.values, build_tree(range(10), 4), EposConfig(40, 0.0, 4))
    logs = execute_mission(sel, ps, paper_map, model, spec)
    return summarize(sel, logs, paper_req, model, paper_map, beta=0.0), sel, logs


def test_summary_consistency(report, paper_req):
    rep, sel, logs = report
    assert rep.fleet_energy == pytest.approx(sum(l.actual_energy for l in logs))
    assert rep.rss_mismatch == rss(sel.global_response, paper_req.values)
    assert 0 <= rep.mission_inefficiency <= 1
    assert len(rep.rows) == 10 and len(rep.trip_series) == 10
    assert all(r.hover_power_w == 31.80 and r.maneuver_power_w == 31.92 for r in rep.rows)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_table_round_trip(report, tmp_path, fmt):
    rep = report[0]
    path = emit_table(rep, tmp_path / f"table.{fmt}", fmt)
    rows = parse_table(path.read_text(), fmt)
    assert rows == rep.rows
    if fmt == "csv":
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == list(TABLE_COLUMNS)
        assert len(lines) == 11


def test_visited_cells_serialization(report):
    row = report[0].rows[0]
    rec = row.record()
    assert rec["visited_cells"] == ";".join(str(c) for c in sorted(row.visited_cells))


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_series_round_trip(report, paper_req, tmp_path, fmt):
    rep, sel, _ = report
    path = emit_trip_series(rep, tmp_path / f"series.{fmt}", fmt)
    target, trips = parse_trip_series(path.read_text(), fmt)
    assert len(trips) == 10
    assert np.array_equal(target.ravel(), paper_req.values)
    assert np.array_equal(trips[-1].ravel(), sel.global_response)
    assert abs(rss(trips[-1].ravel(), target.ravel()) - rep.rss_mismatch) <= 1e-9


def test_zero_drone_run_is_invalid(report, paper_req, model, paper_map):
    from swarmsense.epos import Selection
    empty = Selection((), (), np.zeros(16), float("nan"))
    with pytest.raises(InvalidRunError):
        summarize(empty, [], paper_req, model, paper_map)


def test_bad_format(report, tmp_path):
    with pytest.raises(ValueError):
        emit_table(report[0], tmp_path / "t.xml", "xml")
