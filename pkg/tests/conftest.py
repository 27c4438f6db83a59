import numpy as np
import pytest

from lpmhd.littlewood_paley import build_partition
from lpmhd.spectral import Grid


@pytest.fixture(scope="session")
def grid64():
    return Grid(64)


@pytest.fixture(scope="session")
def part64(grid64):
    return build_partition(grid64)


@pytest.fixture(scope="session")
def grid128():
    return Grid(128)


@pytest.fixture(scope="session")
def part128(grid128):
    return build_partition(grid128)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
