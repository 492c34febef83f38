"""Built-in self-check suite behind the ``verify`` CLI subcommand.

Fast end-to-end sanity checks, deliberately smaller than the test suite.
Each check returns silently on success and raises on failure; the runner
collects the outcomes and reports one line per check.
"""

from math import cos, pi, sin, sqrt

import numpy as np

from . import analysis, reconstruct, shadows, states, windows
from .ising import IsingParams, build_ising, diagonalize, energy_moments, to_energy_basis
from .search import grover_iterate, make_search_plan, run_fp_search


def _spectrum(n):
    params = IsingParams(n=n)
    return params, diagonalize(build_ising(params), params)


def check_spectrum(n):
    params, spectrum = _spectrum(n)
    ham = build_ising(params)
    if np.max(np.abs(ham - ham.conj().T)) > 1e-12:
        raise AssertionError("hamiltonian is not hermitian")
    band = spectrum.eigenvalues[-1] - spectrum.eigenvalues[0]
    if band * spectrum.tau > pi + 1e-12:
        raise AssertionError(f"bandwidth*tau = {band * spectrum.tau:.6f} exceeds pi")
    residual = ham @ spectrum.eigenvectors - spectrum.eigenvectors * spectrum.eigenvalues
    if np.max(np.abs(residual)) > 1e-9:
        raise AssertionError("eigendecomposition residual too large")


def check_zero_energy_states(n):
    params, spectrum = _spectrum(n)
    for z in (0.0, -0.5, 0.5):
        psi = states.product_state(states.solve_bloch(z, params), n)
        mean, _ = energy_moments(spectrum, psi)
        if abs(mean) > 1e-10:
            raise AssertionError(f"z={z}: <H> = {mean:.3e}, expected 0")


def check_reflection_group(n):
    rng = np.random.default_rng(7)
    dim = 2**n
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    target = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    a, b = 0.37, -1.21
    once = states.reflect_about_state(psi, a + b, target)
    twice = states.reflect_about_state(psi, a, states.reflect_about_state(psi, b, target))
    if np.max(np.abs(once - twice)) > 1e-12:
        raise AssertionError("reflection phases do not compose additively")


def check_filter_contraction(n):
    params, spectrum = _spectrum(n)
    win = windows.EnergyWindow(center=0.4, width=1.1)
    blur = windows.blur_params(sqrt(1e-3), 23, spectrum.tau, b=1.0)
    coeffs = windows.blur_coefficients(win, 0.9, blur)
    tail = windows.eta_bound(blur) - 1.0
    if tail <= 0:
        raise AssertionError("eta bound does not exceed 1")
    sup = windows.grid_sup(coeffs.coefficients)
    if sup > 1.0 + 1e-12:
        raise AssertionError(f"blurred filter sup {sup:.12f} exceeds 1")


def check_fixed_point_search(n):
    params, spectrum = _spectrum(n)
    psi = states.product_state(states.solve_bloch(0.0, params), n)
    win = windows.EnergyWindow(center=0.0, width=1.0)
    plan = make_search_plan(sqrt(1e-3), 0.1 * 1.0 / sqrt(n * 1.3525), mode="ideal")
    result = run_fp_search(psi, win, plan, spectrum)
    if result.population_error > 1e-3:
        raise AssertionError(f"population error {result.population_error:.3e} above 1e-3")
    blur = windows.blur_params(plan.delta, plan.d, spectrum.tau, b=1.0)
    blurred_plan = make_search_plan(plan.delta, plan.p_star, mode="blurred")
    blurred = run_fp_search(psi, win, blurred_plan, spectrum, blur=blur)
    if blurred.population_error > 1e-3:
        raise AssertionError(f"blurred population error {blurred.population_error:.3e} above 1e-3")


def check_amplification_identity(n):
    params, spectrum = _spectrum(n)
    psi = states.product_state(states.solve_bloch(0.0, params), n)
    energies = spectrum.eigenvalues
    for center in (0.0, 1.5):
        win = windows.EnergyWindow(center=center, width=1.3)
        mask = windows.window_mask(win, energies, spectrum.tau)
        coeffs = np.abs(to_energy_basis(spectrum, psi)) ** 2
        p_a = float(coeffs[mask].sum())
        if p_a == 0.0 or p_a == 1.0:
            continue
        chi = np.arcsin(sqrt(p_a))
        got = analysis.window_populations(grover_iterate(psi, win, 2, spectrum), win, spectrum)[0]
        want = sin(5 * chi) ** 2
        if abs(got - want) > 1e-10:
            raise AssertionError(f"amplification identity off by {abs(got - want):.2e}")


def check_reconstruction(n):
    params, spectrum = _spectrum(n)
    psi = states.product_state(states.solve_bloch(0.0, params), n)
    partition = reconstruct.partition_windows(spectrum, 1.5)
    decomp = reconstruct.qss_decompose(psi, partition, spectrum)
    z0 = analysis.z_diagonal(0, n)
    exact = float(np.real(np.vdot(psi, z0 * psi)))
    recon = reconstruct.reconstruct_expectation(decomp, z0, 0.0)
    if abs(exact - recon) > 1e-10:
        raise AssertionError(f"t=0 reconstruction off by {abs(exact - recon):.2e}")


def check_shadow_channel(n):
    bloch = states.BlochVector(x=sin(0.8), y=0.0, z=cos(0.8))
    psi = states.product_state(bloch, 1)
    rng = np.random.default_rng(3)
    batch = shadows.sample_shadow_batch(psi, (0,), 2000, rng)
    exact = shadows.shadow_expectation_exact(psi, (0,))
    target = np.outer(psi, psi.conj())
    if np.max(np.abs(exact - target)) > 1e-12:
        raise AssertionError("shadow channel is biased on a pure qubit")
    stderr = shadows.shadow_stderr(batch)
    est = shadows.shadow_reconstruct(batch)
    if np.max(np.abs(est - target) / stderr) > 6.0:
        raise AssertionError("shadow estimate further than 6 standard errors from truth")


CHECKS = [
    ("spectrum", check_spectrum),
    ("zero-energy-states", check_zero_energy_states),
    ("reflection-group", check_reflection_group),
    ("filter-contraction", check_filter_contraction),
    ("fixed-point-search", check_fixed_point_search),
    ("amplification-identity", check_amplification_identity),
    ("reconstruction", check_reconstruction),
    ("shadow-channel", check_shadow_channel),
]


def run_verification(n=8, report=print):
    """Run every named check at chain size n; returns True when all pass."""
    all_ok = True
    for name, check in CHECKS:
        try:
            check(n)
        except Exception as exc:  # noqa: BLE001 - report and continue
            all_ok = False
            report(f"FAIL {name}: {exc}")
        else:
            report(f"ok   {name}")
    return all_ok
