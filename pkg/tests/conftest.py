import pytest

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = ""
    if report.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).splitlines()[0]
    _ACCEPTANCE.append((number, title, report.passed, detail))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE):
        line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
