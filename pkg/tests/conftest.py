"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.outcome != "passed":
        _RESULTS[props["criterion"]] = (report.outcome, props.get("checks", []))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_RESULTS):
        outcome, checks = _RESULTS[name]
        tr.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  criterion {name}")
        for label, ok, detail in checks:
            tr.write_line(f"        [{'ok' if ok else 'FAIL'}] {label}: {detail}")
