import numpy as np
import pytest

from ansatzforge.hamiltonians import h2_spec, maxcut_hamiltonian, path_graph


@pytest.fixture(scope="session")
def maxcut():
    return maxcut_hamiltonian(path_graph())


@pytest.fixture(scope="session")
def h2():
    return h2_spec()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260814)
