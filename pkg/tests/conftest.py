"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_results = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _results.append((props["criterion"], report.outcome, props.get("detail", ""),
                         report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail, secs in sorted(_results):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({secs:.1f}s) {detail}")
