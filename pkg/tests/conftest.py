import numpy as np
import pytest

from whithamlab.grid import Grid
from whithamlab.kernels import resolvent_kernel, whitham_kernel
from whithamlab.steady import petviashvili_solve

SPEEDS = (1.02, 1.05, 1.1, 1.2)


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def waves(grid):
    return {c: petviashvili_solve(c, grid) for c in SPEEDS}


@pytest.fixture(scope="session")
def wave11(waves):
    return waves[1.1]


@pytest.fixture(scope="session")
def kernel_tables(grid):
    return {c: resolvent_kernel(c, grid) for c in (1.1, 1.2, 1.5, 2.0, 3.0)}


@pytest.fixture(scope="session")
def whitham_table(grid):
    return whitham_kernel(grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
