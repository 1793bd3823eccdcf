"""Runs the full verification suite at the default configuration.

Each criterion gets one PASS/FAIL line on the terminal (printed past pytest's
capture) and its own test, which also enforces the wall-time limit.
"""
import pytest

from spinlattice.harness import CHECKS, RunConfig, run_suite

TIME_LIMITS = {
    "fermat.points": 10.0,
    "fermat.lines": 30.0,
    "building.radius1": 300.0,
    "strata.d3": 600.0,
    "dieudonne.roundtrip": 300.0,
}


@pytest.fixture(scope="module")
def report():
    return run_suite(RunConfig())


@pytest.mark.parametrize("check_id", list(CHECKS))
def test_criterion(report, check_id, capsys):
    res = {r.id: r for r in report.results}[check_id]
    limit = TIME_LIMITS.get(check_id)
    in_time = limit is None or res.seconds < limit
    ok = res.passed and in_time
    with capsys.disabled():
        line = f"{'PASS' if ok else 'FAIL'} {check_id}: {res.observed} ({res.seconds:.1f}s"
        print("\n" + line + (f" < {limit:.0f}s)" if limit else ")"))
    assert res.passed, f"expected {res.expected}, observed {res.observed}"
    assert in_time, f"{check_id} took {res.seconds:.1f}s, limit {limit}s"


def test_suite_exit_status(report):
    assert report.ok
