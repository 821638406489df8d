import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """Record (and print) the outcome line of one acceptance criterion."""
    def record(number, title, passed, detail):
        line = "criterion %2d  %s  %s: %s" % (number, "PASS" if passed else "FAIL", title, detail)
        _LINES[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_LINES):
            terminalreporter.write_line(_LINES[number])
