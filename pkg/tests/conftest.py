import pytest

RESULTS = []


@pytest.fixture
def record():
    """Record one acceptance line: ``record(number, name, passed, detail)``."""

    def _record(number, name, passed, detail=""):
        RESULTS.append((number, name, bool(passed), detail))
        print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {name}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(RESULTS):
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {name}: {detail}")
