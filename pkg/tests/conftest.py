import pytest

_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion; printed after the run."""

    def record(number, ok, detail):
        _ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_ACCEPTANCE_LINES[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(_ACCEPTANCE_LINES[number])
