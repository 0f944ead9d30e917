import numpy as np
import pytest

from riccati_scattering.corpus import corpus
from riccati_scattering.direct_map import direct_map
from riccati_scattering.grid import Grid

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def triples(grid):
    return corpus(grid)


@pytest.fixture(scope="session")
def datas(grid, triples):
    return {name: direct_map(t, grid) for name, t in triples.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
