import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thetabound.claims import Context  # noqa: E402
from thetabound.primes import SieveConfig, sieve_build  # noqa: E402


@pytest.fixture(scope="session")
def ctx():
    """Context covering every n <= 10**5."""
    return Context.build(100_000)


@pytest.fixture(scope="session")
def table_1e6():
    return sieve_build(SieveConfig(target_value=2_000_000))


def pytest_collection_modifyitems(config, items):
    if os.environ.get("THBD_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="streams past p_74004585; set THBD_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
