import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from childsel.cli import read_network_text  # noqa: E402
from childsel.network import parse_network  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def bundled(name):
    return parse_network(read_network_text(f"bundled:{name}"))


@pytest.fixture(scope="session")
def ex1():
    return bundled("example1.rn")


@pytest.fixture(scope="session")
def ex2():
    return bundled("example2.rn")


@pytest.fixture(scope="session")
def tca():
    return bundled("ecoli_tca_glyoxylate.rn")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
