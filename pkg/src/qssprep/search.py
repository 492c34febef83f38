"""Fixed-point amplitude amplification onto an energy window.

The preparation operator alternates reflections about the initial state with
reflections about the window,

    F = R_psi(phi_{d-2}) R_A(phi_{d-3}) ... R_psi(phi_1) R_A(phi_0),

rightmost factor applied first, even schedule index driving the window
reflection. The schedule phi_k lists the total relative phase each factor
imprints between the window subspace and its complement; the generalized
reflection e^{-i phi}(1-P) + e^{i phi} P separates the two subspaces by
e^{2 i phi}, so every factor runs at half the listed angle. (The p* -> 0
limit is the familiar pi-phase search: phi_k -> +-pi, and half of that turns
each factor into 1 - 2P up to a global sign.)

For any initial overlap p_A >= p* the prepared population error stays below
delta^2; below threshold the response degrades gracefully instead of
oscillating.
"""

from dataclasses import dataclass
from math import ceil, log, sqrt

import numpy as np

from .ising import Spectrum, from_energy_basis, to_energy_basis
from .windows import (
    BlurSpec,
    EnergyWindow,
    laurent_grid_values,
    laurent_values,
    series_coefficients,
    window_mask,
)


class EmptyWindowError(ValueError):
    """Raised when the initial state has no weight inside the target window."""


@dataclass(frozen=True)
class SearchPlan:
    delta: float
    p_star: float
    d: int
    phases: np.ndarray
    mode: str  # "ideal" or "blurred"


@dataclass(frozen=True)
class PreparationResult:
    state: np.ndarray
    success_prob: float
    population_error: float
    fidelity_vs_ideal: float
    q_h: int
    q_psi: int
    p_a: float


def search_degree(delta: float, p_star: float) -> int:
    if not 0.0 < delta <= 2.0:
        raise ValueError(f"delta must lie in (0, 2], got {delta}")
    if not 0.0 < p_star <= 1.0:
        raise ValueError(f"p_star must lie in (0, 1], got {p_star}")
    return 2 * ceil(log(2.0 / delta) / (2.0 * sqrt(p_star))) + 1


def search_phases(d: int, p_star: float) -> np.ndarray:
    """Schedule phi_k = 2 (-1)^k arccot(sqrt(p*) tan[(k+1) pi / d]), k = 0..d-2.

    The arccot branch is (0, pi), which keeps every phi_k continuous in p* and
    reproduces the pi-phase limit as p* -> 0. d odd keeps the tangent away
    from its pole.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"degree must be odd and >= 3, got {d}")
    k = np.arange(d - 1)
    arccot = np.pi / 2.0 - np.arctan(sqrt(p_star) * np.tan((k + 1) * np.pi / d))
    return 2.0 * (-1.0) ** k * arccot


def make_search_plan(delta: float, p_star: float, mode: str = "ideal") -> SearchPlan:
    if mode not in ("ideal", "blurred"):
        raise ValueError(f"unknown mode {mode!r}")
    d = search_degree(delta, p_star)
    phases = search_phases(d, p_star) if d >= 3 else np.zeros(0)
    return SearchPlan(delta=delta, p_star=p_star, d=d, phases=phases, mode=mode)


def _blurred_window_values(window: EnergyWindow, blur: BlurSpec, phis, theta: np.ndarray):
    """Filter values at the given thetas for several phases, plus their sups.

    The phi dependence of the coefficients factorizes through sin(phi) for
    l != 0, so the expensive Laurent sum is evaluated once and reused for
    every phase in the schedule.
    """
    base = series_coefficients(window, np.pi / 2.0, blur, blur.d_prime)
    center = (base.shape[0] - 1) // 2
    base[center] = 0.0
    structure = laurent_values(base, theta)
    structure_grid = laurent_grid_values(base)
    widened = window.width + blur.h_smooth * blur.blur
    offset = 1j * widened * (blur.tau / np.pi)
    values, sups = [], []
    for phi in phis:
        vals = (np.exp(-1j * phi) + np.sin(phi) * (offset + structure)) / blur.eta
        grid = (np.exp(-1j * phi) + np.sin(phi) * (offset + structure_grid)) / blur.eta
        values.append(vals)
        sups.append(max(np.max(np.abs(vals)), np.max(np.abs(grid))))
    return values, sups


def run_fp_search(
    psi: np.ndarray,
    window: EnergyWindow,
    plan: SearchPlan,
    spectrum: Spectrum,
    blur: BlurSpec = None,
) -> PreparationResult:
    """Apply the alternating product and report population error and cost.

    Ideal mode applies exact window reflections (unitary, success probability
    one). Blurred mode applies the truncated Fourier filter; the lost norm is
    the failure probability and the returned state is renormalized.
    """
    if plan.mode == "blurred" and blur is None:
        raise ValueError("blurred mode needs a BlurSpec")
    psi_e = to_energy_basis(spectrum, psi.astype(complex))
    mask = window_mask(window, spectrum.eigenvalues, spectrum.tau)
    p_a = float(np.sum(np.abs(psi_e[mask]) ** 2))
    if not mask.any() or p_a == 0.0:
        raise EmptyWindowError(
            f"initial state has zero overlap with window ({window.center}, {window.width})"
        )

    half = plan.phases / 2.0
    window_phis = half[0::2]
    coeffs = psi_e.copy()
    if plan.mode == "blurred":
        theta = spectrum.eigenvalues * spectrum.tau
        values, sups = _blurred_window_values(window, blur, window_phis, theta)
        worst = max(sups) if sups else 0.0
        if worst > 1.0 + 1e-12:
            raise ValueError(f"blurred filter exceeds unit modulus: sup = {worst:.15f}")
    else:
        values = [np.where(mask, np.exp(1j * phi), np.exp(-1j * phi)) for phi in window_phis]

    for k in range(plan.d - 1):
        if k % 2 == 0:
            coeffs = coeffs * values[k // 2]
        else:
            phi = half[k]
            overlap = np.vdot(psi_e, coeffs)
            coeffs = np.exp(-1j * phi) * coeffs + (np.exp(1j * phi) - np.exp(-1j * phi)) * overlap * psi_e

    success = float(np.vdot(coeffs, coeffs).real)
    if plan.mode == "ideal":
        if abs(success - 1.0) > 1e-10:
            raise AssertionError(f"ideal product lost norm: {success}")
        success = 1.0
    normalized = coeffs / np.sqrt(success)
    population_error = 1.0 - float(np.sum(np.abs(normalized[mask]) ** 2))
    ideal_component = np.where(mask, psi_e, 0.0) / np.sqrt(p_a)
    fidelity = float(np.abs(np.vdot(ideal_component, normalized)) ** 2)
    q_h = blur.d_prime * (plan.d - 1) if plan.mode == "blurred" else 0
    return PreparationResult(
        state=from_energy_basis(spectrum, normalized),
        success_prob=success,
        population_error=population_error,
        fidelity_vs_ideal=fidelity,
        q_h=q_h,
        q_psi=plan.d - 1,
        p_a=p_a,
    )


def grover_iterate(psi: np.ndarray, window: EnergyWindow, m: int, spectrum: Spectrum) -> np.ndarray:
    """(R_psi R_A)^m psi with plain pi reflections R = 1 - 2P."""
    psi_e = to_energy_basis(spectrum, psi.astype(complex))
    mask = window_mask(window, spectrum.eigenvalues, spectrum.tau)
    coeffs = psi_e.copy()
    for _ in range(m):
        coeffs = np.where(mask, -coeffs, coeffs)
        coeffs = coeffs - 2.0 * np.vdot(psi_e, coeffs) * psi_e
    return from_energy_basis(spectrum, coeffs)
