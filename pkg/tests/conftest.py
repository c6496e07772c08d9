import numpy as np
import pytest

from fstarq import PhaseGrid, default_grid


@pytest.fixture(scope="session")
def grid513():
    return default_grid()


@pytest.fixture(scope="session")
def grid257():
    return PhaseGrid(-8.0, 8.0, -8.0, 8.0, 257, 257, hbar=1.0, offset=0.5)


@pytest.fixture(scope="session")
def origin_grid():
    # offset 0 and odd counts: contains (0, 0), (1, 0), (1, 1) exactly
    return PhaseGrid(-4.0, 4.0, -4.0, 4.0, 129, 129, hbar=1.0, offset=0.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)
