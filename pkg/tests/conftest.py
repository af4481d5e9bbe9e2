import pytest

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Record one summary line per acceptance criterion, then assert it."""
    def record(number, passed, detail):
        ACCEPTANCE_LINES[number] = f"[{number:2d}] {'PASS' if passed else 'FAIL'}  {detail}"
        assert passed, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
