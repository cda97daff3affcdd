from pathlib import Path

import pytest
from hypothesis import settings

from relu_pwa.relu_net import load_net

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def example_net():
    return load_net(DATA / "example_net.json")

# property tests draw fixed example sequences so runs are reproducible
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
