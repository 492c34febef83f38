"""Diagnostics on prepared states.

Covers window populations, overlaps, reduced density matrices, entanglement
entropy, and the register-qubit protocol that turns off-diagonal matrix
elements <psi_A| O |psi_A'> into expectation values of (X + iY) (x) O on a
two-branch superposition. Sampling estimators live in shadows.py.
"""

import numpy as np

from .ising import Spectrum, from_energy_basis, to_energy_basis
from .search import EmptyWindowError, SearchPlan, run_fp_search
from .windows import BlurSpec, EnergyWindow, window_mask


def check_region(region, n: int) -> tuple:
    region = tuple(int(j) for j in region)
    if not region:
        raise ValueError("region must be nonempty")
    if len(set(region)) != len(region):
        raise ValueError(f"region has repeated sites: {region}")
    if any(j < 0 or j >= n for j in region):
        raise ValueError(f"region {region} outside 0..{n - 1}")
    if len(region) >= n:
        raise ValueError("region must be a strict subset of the chain")
    return region


def window_populations(state: np.ndarray, window: EnergyWindow, spectrum: Spectrum):
    """(p_in, epsilon): weight inside the window and the leaked remainder."""
    coeffs = to_energy_basis(spectrum, state.astype(complex))
    mask = window_mask(window, spectrum.eigenvalues, spectrum.tau)
    p_in = float(np.sum(np.abs(coeffs[mask]) ** 2))
    return p_in, 1.0 - p_in


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(np.vdot(a, b)) ** 2)


def state_region_matrix(state: np.ndarray, region, n: int) -> np.ndarray:
    """Reshape a chain state to (2^|R|, 2^|R complement|), region axes first."""
    region = tuple(region)
    rest = [j for j in range(n) if j not in region]
    tensor = np.asarray(state).reshape((2,) * n)
    tensor = np.transpose(tensor, list(region) + rest)
    return tensor.reshape(1 << len(region), -1)


def reduced_density_matrix(state: np.ndarray, region, n: int) -> np.ndarray:
    region = check_region(region, n)
    mat = state_region_matrix(state, region, n)
    return mat @ mat.conj().T


def offdiag_region_block(u: np.ndarray, v: np.ndarray, region, n: int) -> np.ndarray:
    """Block M with Tr[O M] = <u| O (x) 1 |v> for observables O on the region."""
    region = check_region(region, n)
    u_mat = state_region_matrix(u, region, n)
    v_mat = state_region_matrix(v, region, n)
    return v_mat @ u_mat.conj().T


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in nats; eigenvalues below 1e-14 are treated as exact zeros."""
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-14]
    return float(-np.sum(evals * np.log(evals)))


def z_diagonal(site: int, n: int) -> np.ndarray:
    """Diagonal of Z on one site as a length-2^n vector."""
    idx = np.arange(1 << n)
    return 1.0 - 2.0 * ((idx >> (n - 1 - site)) & 1)


def site_average_z(state: np.ndarray, n: int) -> float:
    weights = np.abs(state) ** 2
    return float(np.mean([weights @ z_diagonal(j, n) for j in range(n)]))


def single_site_pauli(kind: str, site: int, n: int) -> np.ndarray:
    """Dense one-site Pauli embedded in the chain; keep n small."""
    paulis = {
        "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        "Y": np.array([[0.0, -1j], [1j, 0.0]]),
        "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    }
    op = np.eye(1, dtype=complex)
    for j in range(n):
        op = np.kron(op, paulis[kind] if j == site else np.eye(2, dtype=complex))
    return op


def _observable_apply(observable: np.ndarray, state: np.ndarray) -> np.ndarray:
    observable = np.asarray(observable)
    if observable.ndim == 1:
        return observable * state
    return observable @ state


def window_component(psi: np.ndarray, window: EnergyWindow, spectrum: Spectrum) -> np.ndarray:
    """Normalized projection of psi onto the window, Pi_A psi / sqrt(p_A)."""
    coeffs = to_energy_basis(spectrum, psi.astype(complex))
    mask = window_mask(window, spectrum.eigenvalues, spectrum.tau)
    weight = float(np.sum(np.abs(coeffs[mask]) ** 2))
    if weight == 0.0:
        raise EmptyWindowError(
            f"state has zero overlap with window ({window.center}, {window.width})"
        )
    return from_energy_basis(spectrum, np.where(mask, coeffs, 0.0) / np.sqrt(weight))


def offdiag_element(
    psi: np.ndarray,
    window_a: EnergyWindow,
    window_b: EnergyWindow,
    observable: np.ndarray,
    spectrum: Spectrum,
    mode: str = "ideal",
    plans=None,
    blur: BlurSpec = None,
):
    """<psi_A| O |psi_B> via the register protocol.

    Builds (|0>|u> + |1>|v>)/sqrt(2) with u, v the two prepared branches and
    evaluates <(X + iY) (x) O> on it. Ideal mode prepares each branch with the
    exact window projector, so the value matches the direct matrix element to
    machine precision. Blurred mode runs the register-controlled blurred
    search on each branch; branch norms are tracked separately and the two
    computable global phases are corrected before returning.
    """
    if mode == "ideal":
        u = window_component(psi, window_a, spectrum)
        v = window_component(psi, window_b, spectrum)
        branch_norm_sq = 2.0
    elif mode == "blurred":
        if plans is None or blur is None:
            raise ValueError("blurred mode needs search plans and a BlurSpec")
        plan_a, plan_b = plans if isinstance(plans, (tuple, list)) else (plans, plans)
        res_a = run_fp_search(psi, window_a, plan_a, spectrum, blur=blur)
        res_b = run_fp_search(psi, window_b, plan_b, spectrum, blur=blur)
        # run_fp_search renormalizes; undo to the honest post-search amplitudes
        u = res_a.state * np.sqrt(res_a.success_prob)
        v = res_b.state * np.sqrt(res_b.success_prob)
        branch_norm_sq = res_a.success_prob + res_b.success_prob
        gamma_a = np.angle(np.vdot(window_component(psi, window_a, spectrum), res_a.state))
        gamma_b = np.angle(np.vdot(window_component(psi, window_b, spectrum), res_b.state))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    # register (x) system vector, register = first tensor factor, then
    # post-selected normalization
    stacked = np.concatenate([u, v]) / np.sqrt(branch_norm_sq)
    total = stacked.shape[0] // 2
    # (X + iY) (x) O = 2 |0><1| (x) O picks the |1> branch into the |0> slot
    flipped = np.concatenate(
        [2.0 * _observable_apply(observable, stacked[total:]), np.zeros(total, dtype=complex)]
    )
    raw = complex(np.vdot(stacked, flipped))
    if mode == "ideal":
        return raw
    # undo post-selection scaling and the two computable global phases
    rescale = branch_norm_sq / (2.0 * np.sqrt(res_a.success_prob * res_b.success_prob))
    return raw * rescale * np.exp(1j * (gamma_a - gamma_b))
