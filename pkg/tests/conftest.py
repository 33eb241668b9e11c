"""Shared fixtures: catalog builds are expensive, so each one runs once per session."""

from __future__ import annotations

import time

import pytest

from affgfm.catalog import get_case
from affgfm.pipeline import CaseResult, build_case

_BUILDS: dict[tuple[str, bool], tuple[CaseResult, float]] = {}
_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def build_timed(case_id: str, checks: bool = True) -> tuple[CaseResult, float]:
    """Build a catalog case once; the seconds reported are those of the first build."""
    key = (case_id, checks)
    if key not in _BUILDS:
        start = time.perf_counter()
        result = build_case(get_case(case_id), with_checks=checks)[0]
        _BUILDS[key] = (result, time.perf_counter() - start)
    return _BUILDS[key]


@pytest.fixture(scope="session")
def built():
    return lambda case_id, checks=True: build_timed(case_id, checks)[0]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark.args
    _CRITERIA.setdefault(number, (title, []))[1].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[number]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}")
