import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA = {
    1: "routing oracle equivalence",
    2: "T1 fixture path and NoPath",
    3: "kinematic round-trip on 100x100 grid",
    4: "determinism of generated files",
    5: "motion-algebra invariants on generated data",
    6: "quasi-disjoint enforcement",
    7: "query templates",
    8: "MOQL parser",
}

_outcomes: dict = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_c(\d+)_")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    failed = report.failed or (report.when == "call" and report.skipped)
    if failed:
        _outcomes[k] = False
    elif report.when == "call":
        _outcomes.setdefault(k, True)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k, title in CRITERIA.items():
        if k in _outcomes:
            status = "PASS" if _outcomes[k] else "FAIL"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"criterion {k}: {status}  {title}")
