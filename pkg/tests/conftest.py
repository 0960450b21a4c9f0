"""Prints one PASS/FAIL line per acceptance criterion at the end of a run."""

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    by_name = {nodeid.split("[", 1)[1].rstrip("]"): outcome for nodeid, outcome in _criteria.items()}
    for number, (name, title, _) in enumerate(CRITERIA, 1):
        outcome = by_name.get(name)
        if outcome is None:
            continue
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {number:2d}  {title}")
