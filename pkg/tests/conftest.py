import pytest

ACCEPTANCE_LINES = {}


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"
        ACCEPTANCE_LINES[(number, request.node.name)] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
