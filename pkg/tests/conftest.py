import pytest

_results = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    n = marker.args[0]
    ok = call.excinfo is None
    _results.setdefault(n, []).append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        tests = _results[n]
        ok = all(passed for _, passed in tests)
        names = ", ".join(name for name, _ in tests)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({names})")
