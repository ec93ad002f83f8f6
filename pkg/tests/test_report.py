"""Check and report plumbing: verdict logic, serialization, environment."""

import json

import pytest
from hypothesis import given, strategies as st

from divlab.report import (CheckResult, VerificationReport, FAIL, INFO, PASS,
                           SKIPPED, worker_count)


finite = st.floats(allow_nan=False, allow_infinity=False,
                   min_value=-1e12, max_value=1e12)


@given(margin=finite, tol=st.floats(min_value=0.0, max_value=1e6,
                                    allow_nan=False))
def test_from_margin_verdict(margin, tol):
    c = CheckResult.from_margin("m", 0.0, tol, margin)
    assert c.verdict == (PASS if margin >= -tol else FAIL)


@given(residual=finite, tol=st.floats(min_value=0.0, max_value=1e6,
                                      allow_nan=False))
def test_from_residual_verdict(residual, tol):
    c = CheckResult.from_residual("r", residual, tol)
    assert c.verdict == (PASS if abs(residual) <= tol else FAIL)
    assert c.margin == tol - abs(residual)


def test_margin_boundary_is_a_pass():
    assert CheckResult.from_margin("edge", 0.0, 1e-12, -1e-12).verdict == PASS


def test_report_verdict_aggregation():
    rep = VerificationReport(scenario="agg")
    rep.add(CheckResult.from_margin("ok", 0.0, 0.0, 1.0))
    rep.add(CheckResult.info("note", 3.0))
    rep.add(CheckResult.skipped("later", "missing input"))
    assert rep.verdict == PASS
    rep.add(CheckResult.from_margin("bad", 0.0, 0.0, -1.0))
    assert rep.verdict == FAIL
    assert [c.name for c in rep.failures()] == ["bad"]


def test_info_and_skipped_do_not_decide():
    rep = VerificationReport(scenario="quiet")
    rep.add(CheckResult.info("just a number", 1.0))
    rep.add(CheckResult.skipped("not run", ""))
    assert rep.verdict == PASS


def test_to_json_is_sorted_and_stable():
    rep = VerificationReport(scenario="s", environment={"seed": 7})
    rep.add(CheckResult.from_margin("a", 1.0, 0.5, 0.25, detail="d"))
    d = json.loads(rep.to_json())
    assert set(d) == {"scenario", "checks", "environment", "timestamp",
                      "verdict"}
    assert d["environment"]["seed"] == 7
    assert d["environment"]["precision"] == "float64"
    assert rep.to_json() == rep.to_json()


def test_write_appends_newline(tmp_path):
    rep = VerificationReport(scenario="w")
    out = tmp_path / "rep.json"
    rep.write(out)
    assert out.read_text().endswith("\n")


def test_timestamp_is_utc_iso():
    rep = VerificationReport(scenario="t")
    assert rep.timestamp.endswith("+00:00") or rep.timestamp.endswith("Z")


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("DIVLAB_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("DIVLAB_WORKERS")
    assert worker_count() >= 1


def test_worker_count_rejects_garbage(monkeypatch):
    monkeypatch.setenv("DIVLAB_WORKERS", "many")
    with pytest.raises(ValueError):
        worker_count()
