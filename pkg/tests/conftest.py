import pytest

from stoplab import poisson

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table():
    return poisson.default_cutoffs()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
