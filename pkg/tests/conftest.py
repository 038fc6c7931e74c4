import numpy as np
import pytest

from divkit.data import LabeledDataset

ACCEPTANCE_LINES: list[str] = []


def make_dataset(n=40, dim=3, seed=0):
    rng = np.random.default_rng(seed)
    return LabeledDataset(np.arange(n), rng.normal(size=(n, dim)), rng.integers(0, 2, n), dim)


@pytest.fixture
def small_ds():
    return make_dataset()


@pytest.fixture
def toy_1d():
    return LabeledDataset([0, 1, 2, 3], [[-1.0], [-2.0], [1.0], [2.0]], [0, 0, 1, 1], 1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
