"""Print one verdict line per headline acceptance check.

Tests marked ``@pytest.mark.verdict("label")`` get a ``label: PASS`` or
``label: FAIL`` line in the terminal summary, in definition order.
"""

import pytest

_results: list[tuple[str, str]] = []
_labels: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "verdict(label): emit a summary verdict line for this test"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("verdict")
        if mark is not None:
            _labels[item.nodeid] = mark.args[0]


def pytest_runtest_logreport(report):
    if report.when != "call" or report.nodeid not in _labels:
        return
    outcome = "PASS" if report.passed else "FAIL"
    _results.append((_labels[report.nodeid], outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance verdicts")
    for label, outcome in _results:
        terminalreporter.write_line(f"{label}: {outcome}")
