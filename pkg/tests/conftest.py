import numpy as np
import pytest

from qssprep import states
from qssprep.ising import IsingParams, build_ising, diagonalize


@pytest.fixture(scope="session")
def chain6():
    params = IsingParams(n=6)
    return params, diagonalize(build_ising(params), params)


@pytest.fixture(scope="session")
def chain8():
    params = IsingParams(n=8)
    return params, diagonalize(build_ising(params), params)


def zero_state(params, z=0.0):
    return states.product_state(states.solve_bloch(z, params), params.n)


def random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
