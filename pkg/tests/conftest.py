import numpy as np
import pytest

from catalytic.core import ModelParams


@pytest.fixture
def baseline():
    return ModelParams()


def philox(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
