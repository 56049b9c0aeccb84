import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA = {
    1: "intro formula over transitive frames",
    2: "Euclidean blow-up",
    3: "oracle agreement over all 32 classes",
    4: "minimization bounds",
    5: "canonical grid model satisfies Gamma",
    6: "tiling round trip at n=1",
    7: "subscript discipline of tiling-gen",
    8: "normal-form stability",
}

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when != "call" and not report.failed and not report.skipped:
        return
    n = marker.args[0]
    entry = _results.setdefault(n, [])
    if hasattr(report, "wasxfail"):
        entry.append((item.name, False, f"expected failure: {report.wasxfail}"))
    elif report.failed:
        entry.append((item.name, False, "failed"))
    elif report.skipped:
        entry.append((item.name, False, "skipped"))
    else:
        entry.append((item.name, True, ""))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        entries = _results.get(n)
        if not entries:
            tr.write_line(f"criterion {n} ({title}): NOT RUN")
            continue
        ok = all(passed for _, passed, _ in entries)
        tr.write_line(f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'}")
        for name, passed, why in entries:
            if not passed:
                tr.write_line(f"    {name}: {why}")
