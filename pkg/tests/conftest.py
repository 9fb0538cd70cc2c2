import pytest

from quartic_action import ExtremalChart, OscillatorParams

# filled by test_acceptance; printed after the run so the lines survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def params():
    return OscillatorParams(1.0, 4.0)


@pytest.fixture
def unit_chart(params):
    return ExtremalChart(params, 1.0)
