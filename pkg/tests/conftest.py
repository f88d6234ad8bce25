import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for the acceptance summary."""

    def record(tag, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("AC")[1].split(" ")[0])):
            terminalreporter.write_line(line)
