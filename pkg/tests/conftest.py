import pytest

from arithchern.hermitian import ChartGrid


@pytest.fixture(scope="session")
def grid64():
    return ChartGrid.build(64)


@pytest.fixture(scope="session")
def grid256():
    return ChartGrid.build(256)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
