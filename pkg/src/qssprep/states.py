"""Zero-energy product states and generalized reflections about a state."""

from dataclasses import dataclass

import numpy as np

from .ising import IsingParams


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float


def solve_bloch(z: float, params: IsingParams) -> BlochVector:
    """Single-site Bloch vector with <H> = 0 for the product state.

    The chain energy of a translation-invariant product state vanishes when
    <Z>^2 + h <Z> + g <X> = 0, which fixes x from z. The y >= 0 branch is
    taken; the remaining freedom is the sign of y only.
    """
    if params.g == 0:
        raise ValueError("g = 0 leaves <X> unconstrained")
    x = -(z * z + params.h_field * z) / params.g
    planar = x * x + z * z
    if planar > 1.0 + 1e-12:
        raise ValueError(f"no unit Bloch vector for z={z}: x^2+z^2 exceeds 1 by {planar - 1.0:.3e}")
    y = float(np.sqrt(max(0.0, 1.0 - planar)))
    return BlochVector(x=float(x), y=y, z=float(z))


def product_state(b: BlochVector, n: int) -> np.ndarray:
    theta = np.arccos(np.clip(b.z, -1.0, 1.0))
    azimuth = np.arctan2(b.y, b.x)
    site = np.array([np.cos(theta / 2.0), np.exp(1j * azimuth) * np.sin(theta / 2.0)])
    psi = site
    for _ in range(n - 1):
        psi = np.kron(psi, site)
    return psi


def reflect_about_state(psi: np.ndarray, phi: float, target: np.ndarray) -> np.ndarray:
    """Apply e^{-i phi}(1 - P) + e^{i phi} P to target, P = |psi><psi|.

    Rank-1 update, cost O(D); never materializes the dense operator.
    """
    overlap = np.vdot(psi, target)
    return np.exp(-1j * phi) * target + (np.exp(1j * phi) - np.exp(-1j * phi)) * overlap * psi
