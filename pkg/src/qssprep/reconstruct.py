"""Window partitions, QSS decompositions, and reconstructed dynamics.

Replacing H by sum_A E_A Pi_A (windows of common width W anchored at the
ground-state energy) turns exact evolution into dephasing between window
components. For a pure state the reconstructed density matrix stays pure:

    rho_W(t) = |phi(t)><phi(t)|,  |phi(t)> = sum_A sqrt(p_A) e^{-i E_A t} |psi_A>.

The trace distance to the exact evolved state obeys (1/2)||rho - rho_W||_1
<= e^{W t} - 1, and the same bound controls reconstructed expectation values
of unit-norm observables.
"""

from dataclasses import dataclass

import numpy as np

from .analysis import check_region, state_region_matrix
from .ising import Spectrum, from_energy_basis, to_energy_basis
from .windows import EnergyWindow


@dataclass(frozen=True)
class WindowPartition:
    windows: tuple
    width: float
    edges: np.ndarray

    @property
    def count(self) -> int:
        return len(self.windows)


@dataclass(frozen=True)
class QssDecomposition:
    weights: np.ndarray       # p_A, kept windows only
    components: np.ndarray    # (K, D) normalized |psi_A> rows, computational basis
    centers: np.ndarray       # window centers E_A
    dropped_weight: float
    floor: float


def partition_windows(spectrum: Spectrum, width: float) -> WindowPartition:
    """Contiguous equal-width bins anchored at the ground-state energy.

    Bins are half-open with boundary eigenvalues assigned to the lower bin, so
    every eigenvalue lands in exactly one window.
    """
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")
    lo = float(spectrum.eigenvalues[0])
    band = float(spectrum.eigenvalues[-1] - spectrum.eigenvalues[0])
    count = max(1, int(np.ceil(band / width)))
    edges = lo + width * np.arange(count + 1)
    windows = tuple(EnergyWindow(center=lo + (k + 0.5) * width, width=width) for k in range(count))
    return WindowPartition(windows=windows, width=width, edges=edges)


def bin_indices(partition: WindowPartition, energies: np.ndarray) -> np.ndarray:
    """Window index for every energy; boundaries go to the lower bin."""
    return np.searchsorted(partition.edges[1:-1], energies, side="left")


def qss_decompose(psi: np.ndarray, partition: WindowPartition, spectrum: Spectrum, floor: float = 1e-12) -> QssDecomposition:
    coeffs = to_energy_basis(spectrum, psi.astype(complex))
    idx = bin_indices(partition, spectrum.eigenvalues)
    weights = np.zeros(partition.count)
    np.add.at(weights, idx, np.abs(coeffs) ** 2)
    kept = np.flatnonzero(weights >= floor)
    components = np.empty((kept.size, coeffs.shape[0]), dtype=complex)
    for row, k in enumerate(kept):
        masked = np.where(idx == k, coeffs, 0.0)
        components[row] = from_energy_basis(spectrum, masked / np.sqrt(weights[k]))
    centers = np.array([partition.windows[k].center for k in kept])
    return QssDecomposition(
        weights=weights[kept],
        components=components,
        centers=centers,
        dropped_weight=max(0.0, float(weights.sum() - weights[kept].sum())),
        floor=floor,
    )


def reconstruction_state(decomp: QssDecomposition, t: float) -> np.ndarray:
    """|phi(t)> = sum_A sqrt(p_A) e^{-i E_A t} |psi_A>."""
    amplitudes = np.sqrt(decomp.weights) * np.exp(-1j * decomp.centers * t)
    return amplitudes @ decomp.components


def matrix_elements(decomp: QssDecomposition, observable: np.ndarray) -> np.ndarray:
    """<psi_A| O |psi_A'> for all kept window pairs; O dense or diagonal."""
    observable = np.asarray(observable)
    if observable.ndim == 1:
        acted = decomp.components * observable[None, :]
    else:
        acted = decomp.components @ observable.T
    return decomp.components.conj() @ acted.T


def reconstruct_expectation(decomp: QssDecomposition, observable: np.ndarray, t: float, elements: np.ndarray = None) -> float:
    """Double sum over window pairs with dephasing factors e^{i(E_A - E_A')t}.

    Pass precomputed matrix_elements when sweeping t; Hermiticity keeps the
    value real and the imaginary residue is checked.
    """
    if elements is None:
        elements = matrix_elements(decomp, observable)
    phased = np.sqrt(decomp.weights) * np.exp(-1j * decomp.centers * t)
    value = complex(phased.conj() @ elements @ phased)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise AssertionError(f"reconstructed expectation has imaginary part {value.imag:.3e}")
    return value.real


def rdm_blocks(decomp: QssDecomposition, region, n: int) -> np.ndarray:
    """Region blocks sqrt(p_A p_A') Tr_complement |psi_A><psi_A'| for all pairs."""
    region = check_region(region, n)
    size = 1 << len(region)
    k = decomp.weights.shape[0]
    mats = np.array([state_region_matrix(c, region, n) for c in decomp.components])
    blocks = np.empty((k, k, size, size), dtype=complex)
    for a in range(k):
        for b in range(k):
            blocks[a, b] = np.sqrt(decomp.weights[a] * decomp.weights[b]) * (mats[a] @ mats[b].conj().T)
    return blocks


def reconstruct_rdm(decomp: QssDecomposition, region, n: int, t: float, blocks: np.ndarray = None) -> np.ndarray:
    if blocks is None:
        blocks = rdm_blocks(decomp, region, n)
    phases = np.exp(-1j * decomp.centers * t)
    weights = np.einsum("a,b->ab", phases, phases.conj())
    return np.einsum("ab,abij->ij", weights, blocks)


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """(1/2) ||rho1 - rho2||_1 from singular values of the difference."""
    return 0.5 * float(np.linalg.svd(rho1 - rho2, compute_uv=False).sum())


def dephasing_bound(width: float, t: float) -> float:
    return float(np.exp(width * np.abs(t)) - 1.0)
