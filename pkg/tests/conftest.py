"""Reporting hooks for the acceptance suite.

Each acceptance test attaches ``("criterion", title)`` and optional
``("detail", text)`` pairs through ``record_property``; the terminal summary
prints one PASS/FAIL line per criterion regardless of output capture.
"""

_acceptance: dict[str, dict] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    entry = _acceptance.setdefault(report.nodeid, {"passed": True, "props": []})
    if report.when == "call" or report.failed:
        entry["props"] = list(report.user_properties) or entry["props"]
    if report.failed:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, entry in _acceptance.items():
        props = entry["props"]
        title = next((v for k, v in props if k == "criterion"), nodeid.split("::")[-1])
        status = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(f"{status}  {title}")
        for key, value in props:
            if key == "detail":
                terminalreporter.write_line(f"      {value}")
