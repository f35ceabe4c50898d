import numpy as np
import pytest

from edgecount import de_gennes


@pytest.fixture(scope="session")
def constants():
    return de_gennes.default_constants()


@pytest.fixture(scope="session")
def branches(constants):
    return de_gennes.default_branches()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
