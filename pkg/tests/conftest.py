from __future__ import annotations

import time

import pytest

from adr import scenarios
from adr.ids import Allocator


@pytest.fixture
def alloc() -> Allocator:
    return Allocator()


@pytest.fixture
def travel_tg():
    return scenarios.travel_vocabulary()


@pytest.fixture
def failover_tg():
    return scenarios.failover_vocabulary()


# -- acceptance reporting ----------------------------------------------------
#
# Tests marked @pytest.mark.acceptance("<criterion>", budget_s=N) print one
# PASS/FAIL line each in the terminal summary, with their wall-clock time.

_ACCEPTANCE_RESULTS: dict[str, tuple[str, float, float]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name, budget_s): acceptance criterion with a runtime budget")


@pytest.fixture
def acceptance_timer(request):
    marker = request.node.get_closest_marker("acceptance")
    start = time.perf_counter()
    yield
    if marker is None:
        return
    name = marker.args[0]
    budget = marker.kwargs.get("budget_s", 0.0)
    elapsed = time.perf_counter() - start
    _ACCEPTANCE_RESULTS[request.node.nodeid] = (name, elapsed, budget)
    if budget and elapsed > budget:
        raise AssertionError(f"{name}: took {elapsed:.2f}s, budget is {budget:.0f}s")


def pytest_runtest_logreport(report):
    if report.when not in ("call", "teardown"):
        return
    entry = _ACCEPTANCE_RESULTS.get(report.nodeid)
    if entry is None:
        return
    name, elapsed, budget = entry
    if report.failed:
        _ACCEPTANCE_RESULTS[report.nodeid] = (name, elapsed, -abs(budget))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, elapsed, budget in _ACCEPTANCE_RESULTS.values():
        verdict = "PASS" if budget >= 0 else "FAIL"
        limit = f" (budget {abs(budget):.0f}s)" if budget else ""
        terminalreporter.write_line(f"{verdict}  {name}  {elapsed:.2f}s{limit}")
