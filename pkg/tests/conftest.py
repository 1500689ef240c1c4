import pytest

from _support import ACCEPTANCE, acceptance_line, invariant_table
from siegelcm.cmdata import CmContext


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(acceptance_line(n))


@pytest.fixture(scope="session")
def ctx5():
    return CmContext.for_prime(5)


@pytest.fixture(scope="session")
def table5():
    return invariant_table(5, 5, 512)


@pytest.fixture(scope="session")
def table6():
    return invariant_table(5, 6, 768)
