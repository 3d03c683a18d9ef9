import pytest

_results: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    info = getattr(report, "criterion", None)
    if info is None:
        return
    n, title = info
    entry = _results.setdefault(n, {"title": title, "ok": True})
    entry["ok"] = entry["ok"] and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        r = _results[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if r['ok'] else 'FAIL'}  {r['title']}")
