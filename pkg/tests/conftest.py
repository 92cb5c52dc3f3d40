import numpy as np
import pytest
from scipy.stats import unitary_group

from osmgsc.basis import Dims, Propagator
from osmgsc.states import DensityOperator


@pytest.fixture
def rng():
    return np.random.default_rng(20141015)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_unitary(rng, dim):
    return unitary_group.rvs(dim, random_state=rng)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_propagator(rng, n, m=2):
    dims = Dims(n, m)
    return Propagator(dims, random_unitary(rng, dims.total))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
