"""Dense spectral toolbox for the mixed-field Ising chain.

Everything downstream (filters, searches, reconstructions) works in the
eigenbasis produced here, so this module stays deliberately simple: build the
Hamiltonian once, diagonalize it once, and expose exact evolution plus energy
moments. The chain is

    H = -sum_j (Z_j Z_{j+1} + h Z_j + g X_j)

with periodic boundaries. Site 0 occupies the most significant bit of the
computational-basis index, matching the tensor order of `np.kron`.
"""

from dataclasses import dataclass

import numpy as np

# Dense storage grows as 4^N; beyond this the eigensolver stops being a
# desk-scale tool.
DENSE_QUBIT_CAP = 14


@dataclass(frozen=True)
class IsingParams:
    n: int
    g: float = -1.05
    h_field: float = 0.5
    # boundary is always periodic; kept as a field so configs round-trip
    boundary: str = "periodic"


@dataclass(frozen=True)
class Spectrum:
    """Exact eigendecomposition plus the evolution step tau.

    eigenvalues are ascending; eigenvector columns are the energy eigenstates
    in the computational basis. tau is sized so the full bandwidth fits on the
    frequency circle: (E_max - E_min) * tau <= 2 pi.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tau: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def site_bits(n: int) -> np.ndarray:
    """(D, n) array of bits, site 0 in the most significant position."""
    idx = np.arange(1 << n)
    return (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1


def build_ising(params: IsingParams) -> np.ndarray:
    n = params.n
    if n < 2:
        raise ValueError(f"need at least 2 sites, got {n}")
    if n > DENSE_QUBIT_CAP:
        raise ValueError(f"n={n} exceeds dense cap {DENSE_QUBIT_CAP}")
    dim = 1 << n
    z = 1.0 - 2.0 * site_bits(n)
    zz = np.sum(z * np.roll(z, -1, axis=1), axis=1)
    ham = np.zeros((dim, dim))
    idx = np.arange(dim)
    ham[idx, idx] = -(zz + params.h_field * z.sum(axis=1))
    for j in range(n):
        flipped = idx ^ (1 << (n - 1 - j))
        ham[idx, flipped] += -params.g
    return ham


def choose_tau(params: IsingParams) -> float:
    """Conservative step from the coupling-norm bound on the bandwidth.

    ||H|| <= N (1 + |g| + |h|), so this tau keeps the spectrum inside half the
    frequency circle with room to spare.
    """
    return np.pi / (2.0 * params.n * (1.0 + abs(params.g) + abs(params.h_field)))


def diagonalize(ham: np.ndarray, params: IsingParams) -> Spectrum:
    eigenvalues, eigenvectors = np.linalg.eigh(ham)
    tau = choose_tau(params)
    spread = (eigenvalues[-1] - eigenvalues[0]) * tau
    if spread > 2.0 * np.pi + 1e-9:
        raise ValueError(f"bandwidth*tau = {spread:.6f} exceeds 2 pi")
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors, tau=tau)


def to_energy_basis(spectrum: Spectrum, state: np.ndarray) -> np.ndarray:
    v = spectrum.eigenvectors
    if np.iscomplexobj(v):
        return v.conj().T @ state
    return v.T @ state


def from_energy_basis(spectrum: Spectrum, coeffs: np.ndarray) -> np.ndarray:
    return spectrum.eigenvectors @ coeffs


def evolve(spectrum: Spectrum, state: np.ndarray, t: float) -> np.ndarray:
    coeffs = to_energy_basis(spectrum, state)
    coeffs = coeffs * np.exp(-1j * spectrum.eigenvalues * t)
    return from_energy_basis(spectrum, coeffs)


def energy_moments(spectrum: Spectrum, state: np.ndarray):
    """(mean, variance) of H in the given normalized state."""
    weights = np.abs(to_energy_basis(spectrum, state)) ** 2
    mean = float(weights @ spectrum.eigenvalues)
    second = float(weights @ spectrum.eigenvalues**2)
    return mean, second - mean * mean


def shift_permutation(n: int) -> np.ndarray:
    """Index permutation for a cyclic shift of sites by one."""
    bits = site_bits(n)
    shifted = np.roll(bits, -1, axis=1)
    return shifted @ (1 << np.arange(n - 1, -1, -1))
