import os
from collections import OrderedDict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_results: "OrderedDict[int, list]" = OrderedDict()


def pytest_runtest_logreport(report):
    if report.when != "call" and report.outcome != "failed":
        return
    for number, label in _criteria_of(report):
        entry = _results.setdefault(number, [label, True, 0])
        if report.when == "call":
            entry[2] += 1
        if report.outcome != "passed":
            entry[1] = False


def _criteria_of(report):
    return [tuple(args) for args in getattr(report, "criteria", ())]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criteria = [m.args for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        label, ok, ran = _results[number]
        status = "PASS" if ok and ran else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {label}: {status}")
