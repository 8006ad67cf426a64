import pytest

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, passed: bool, detail: str, elapsed: float | None = None) -> None:
    t = "" if elapsed is None else f" [{elapsed:.1f}s]"
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {'PASS' if passed else 'FAIL'} - {detail}{t}"


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
