import numpy as np
import pytest

from conftest import random_state
from qssprep import states
from qssprep.ising import IsingParams, build_ising

PAULI = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1j], [1j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def test_bloch_solution_frozen_values():
    b = states.solve_bloch(0.5, IsingParams(n=2))
    assert b.x == pytest.approx(0.47619047619047616, abs=1e-14)
    assert b.y == pytest.approx(0.7233551205220625, abs=1e-12)
    assert b.z == 0.5
    # z = 0 lands on the +Y axis
    b0 = states.solve_bloch(0.0, IsingParams(n=2))
    assert (b0.x, b0.y, b0.z) == (0.0, 1.0, 0.0)


def test_bloch_vector_is_unit_length():
    params = IsingParams(n=2)
    for z in np.linspace(-0.7, 0.6, 14):
        b = states.solve_bloch(float(z), params)
        assert b.x**2 + b.y**2 + b.z**2 == pytest.approx(1.0, abs=1e-12)
        assert b.y >= 0.0


def test_bloch_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        states.solve_bloch(0.3, IsingParams(n=2, g=0.0))
    with pytest.raises(ValueError, match="exceeds"):
        # large |z| pushes x^2 + z^2 past the sphere
        states.solve_bloch(-0.99, IsingParams(n=2))


def test_product_state_site_marginals():
    b = states.solve_bloch(0.35, IsingParams(n=2))
    psi = states.product_state(b, 3)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
    tensor = psi.reshape(2, 2, 2)
    for site in range(3):
        rho = np.tensordot(
            np.moveaxis(tensor, site, 0).reshape(2, 4),
            np.moveaxis(tensor, site, 0).reshape(2, 4).conj(),
            axes=([1], [1]),
        )
        for name, want in (("X", b.x), ("Y", b.y), ("Z", b.z)):
            assert np.trace(PAULI[name] @ rho).real == pytest.approx(want, abs=1e-12)


def test_product_state_has_zero_chain_energy():
    for z in (-0.5, 0.0, 0.25, 0.5):
        for n in (2, 3, 4):
            params = IsingParams(n=n)
            psi = states.product_state(states.solve_bloch(z, params), n)
            energy = np.vdot(psi, build_ising(params) @ psi).real
            assert abs(energy) < 1e-10


def test_reflection_matches_dense_operator():
    rng = np.random.default_rng(2)
    for _ in range(20):
        dim = int(rng.integers(2, 9))
        psi = random_state(rng, dim)
        target = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        phi = float(rng.uniform(-np.pi, np.pi))
        proj = np.outer(psi, psi.conj())
        dense = np.exp(-1j * phi) * (np.eye(dim) - proj) + np.exp(1j * phi) * proj
        got = states.reflect_about_state(psi, phi, target)
        assert np.max(np.abs(got - dense @ target)) < 1e-12


def test_reflection_phases_compose():
    rng = np.random.default_rng(5)
    psi = random_state(rng, 12)
    target = random_state(rng, 12)
    for _ in range(10):
        a, b = rng.uniform(-2 * np.pi, 2 * np.pi, size=2)
        two_step = states.reflect_about_state(psi, a, states.reflect_about_state(psi, b, target))
        one_step = states.reflect_about_state(psi, a + b, target)
        assert np.max(np.abs(two_step - one_step)) < 1e-12


def test_reflection_half_pi_is_signed_grover_flip():
    rng = np.random.default_rng(9)
    psi = random_state(rng, 10)
    target = random_state(rng, 10)
    got = states.reflect_about_state(psi, np.pi / 2.0, target)
    grover = target - 2.0 * np.vdot(psi, target) * psi
    assert np.max(np.abs(got - (-1j) * grover)) < 1e-12
