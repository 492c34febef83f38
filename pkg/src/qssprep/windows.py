"""Energy-window reflections, ideal and Gaussian-blurred.

The ideal reflection multiplies eigenstate amplitudes by e^{i phi} inside the
window and e^{-i phi} outside. The blurred variant replaces the sharp box by
its convolution with a Gaussian of width B (after widening the box by h*B on
each side), truncates the resulting Fourier series at half-degree d', and
rescales by eta so the truncated filter never exceeds unit modulus. The
filter is a Laurent polynomial in e^{-i theta} with theta = E*tau, so one
application costs 2*d' controlled-evolution queries.

Coefficient conventions, with w = (W_A + h B) * tau / 2 and theta_A = E_A tau:

    c_l = (2i / (pi l)) sin(phi) sin(l w) e^{-(l B tau)^2 / 2} e^{i l theta_A}
    c_0 = e^{-i phi} + i (W_A + h B) (tau / pi) sin(phi)

These are the exact Fourier coefficients of the blurred box (checked against
direct quadrature in the tests). The applied coefficients are c_l / eta.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .ising import Spectrum, from_energy_basis, to_energy_basis


@dataclass(frozen=True)
class EnergyWindow:
    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError(f"window width must be positive, got {self.width}")


@dataclass(frozen=True)
class BlurSpec:
    blur: float          # Gaussian width B, energy units
    h_smooth: float      # tail cutoff, suppresses plateau error to ~e^{-h^2/8}
    d_prime: int         # Laurent half-degree
    tau: float
    eta: float           # rescaling keeping the truncated filter contractive

    def __post_init__(self):
        if self.blur <= 0 or self.h_smooth <= 0 or self.d_prime < 1:
            raise ValueError("blur, h_smooth must be positive and d_prime >= 1")
        if self.d_prime * self.blur * self.tau < 1.0:
            raise ValueError("d' * B * tau < 1: truncation would sit inside the Gaussian core")


@dataclass(frozen=True)
class FourierReflection:
    """Applied Laurent coefficients q_l for l in [-d', d'], already / eta."""

    coefficients: np.ndarray
    window: EnergyWindow
    blur: BlurSpec
    phi: float

    @property
    def d_prime(self) -> int:
        return (self.coefficients.shape[0] - 1) // 2


def window_mask(window: EnergyWindow, energies: np.ndarray, tau: float) -> np.ndarray:
    """Strict membership |E - E_A| < W_A/2, distance taken on the circle.

    tau maps energies onto a circle of circumference 2 pi / tau; the distance
    wraps accordingly. For spectra produced by choose_tau the band occupies at
    most half the circle and wrapping never triggers, but windows near the
    seam still behave correctly.
    """
    period = 2.0 * np.pi / tau
    delta = np.remainder(energies - window.center + period / 2.0, period) - period / 2.0
    return np.abs(delta) < window.width / 2.0


def ideal_reflection_values(window: EnergyWindow, phi: float, spectrum: Spectrum) -> np.ndarray:
    mask = window_mask(window, spectrum.eigenvalues, spectrum.tau)
    if not mask.any():
        warnings.warn(f"window ({window.center}, {window.width}) contains no eigenvalue", RuntimeWarning)
    return np.where(mask, np.exp(1j * phi), np.exp(-1j * phi))


def eta_bound(blur: BlurSpec) -> float:
    """Upper bound 1 + (tail of the coefficient series beyond d').

    The term-wise bound |c_l| <= (2 / pi l) e^{-(l B tau)^2/2} is summed with a
    geometric-series majorant starting at l = d'+1.
    """
    m = blur.d_prime + 1
    bt = blur.blur * blur.tau
    lead = (4.0 / (np.pi * m)) * np.exp(-((m * bt) ** 2) / 2.0)
    ratio = np.exp(-m * bt * bt / 2.0)
    return 1.0 + lead / (1.0 - ratio)


def series_coefficients(window: EnergyWindow, phi: float, blur: BlurSpec, half_degree: int) -> np.ndarray:
    """Exact Fourier coefficients c_l of the blurred box, l in [-half_degree, half_degree].

    These are not yet divided by eta; blur_coefficients does that.
    """
    ell = np.arange(-half_degree, half_degree + 1)
    widened = window.width + blur.h_smooth * blur.blur
    w_half = widened * blur.tau / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        coeffs = (
            (2j / (np.pi * ell))
            * np.sin(phi)
            * np.sin(ell * w_half)
            * np.exp(-((ell * blur.blur * blur.tau) ** 2) / 2.0)
            * np.exp(1j * ell * window.center * blur.tau)
        )
    coeffs[half_degree] = np.exp(-1j * phi) + 1j * widened * (blur.tau / np.pi) * np.sin(phi)
    return coeffs


def laurent_values(coefficients: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Evaluate sum_l q_l e^{-i l theta} by Horner on z = e^{-i theta}."""
    half = (coefficients.shape[0] - 1) // 2
    z = np.exp(-1j * np.asarray(theta, dtype=float))
    acc = np.full_like(z, coefficients[-1])
    for m in range(coefficients.shape[0] - 2, -1, -1):
        acc = acc * z + coefficients[m]
    return acc * np.exp(1j * half * np.asarray(theta, dtype=float))


def laurent_grid_values(coefficients: np.ndarray, oversample: int = 16) -> np.ndarray:
    """Filter values on a uniform theta grid dense enough to bound the sup.

    The grid has at least oversample * d' points (power of two), so a
    half-degree-d' trigonometric polynomial is safely resolved.
    """
    half = (coefficients.shape[0] - 1) // 2
    size = 1
    while size < max(oversample * max(half, 1), 64):
        size *= 2
    padded = np.zeros(size, dtype=complex)
    ell = np.arange(-half, half + 1)
    padded[np.mod(ell, size)] = coefficients
    return np.fft.fft(padded)


def grid_sup(coefficients: np.ndarray) -> float:
    return float(np.max(np.abs(laurent_grid_values(coefficients))))


def blur_coefficients(window: EnergyWindow, phi: float, blur: BlurSpec) -> FourierReflection:
    if blur.h_smooth * blur.blur >= window.width:
        raise ValueError(
            f"h*B = {blur.h_smooth * blur.blur:.4g} >= window width {window.width:.4g}: "
            "widened window exceeds the design regime"
        )
    applied = series_coefficients(window, phi, blur, blur.d_prime) / blur.eta
    sup = grid_sup(applied)
    if sup > 1.0 + 1e-12:
        raise ValueError(f"truncated filter exceeds unit modulus: sup = {sup:.15f}")
    return FourierReflection(coefficients=applied, window=window, blur=blur, phi=phi)


def blur_params(delta: float, d_star: int, tau: float, b: float = 1.0, h_smooth: float = 8.0) -> BlurSpec:
    """Preset blur for a degree-d_star search: B = b / (d*^2 tau), d' = ceil(5 / (B tau)).

    With these choices d' * B * tau = 5, so eta - 1 is of order e^{-12.5}.
    """
    if d_star < 1 or d_star % 2 == 0:
        raise ValueError(f"d_star must be odd and positive, got {d_star}")
    if np.exp(-h_smooth * h_smooth / 8.0) > delta:
        warnings.warn(f"h_smooth={h_smooth} leaves plateau error above delta={delta}", RuntimeWarning)
    blur = b / (d_star * d_star * tau)
    d_prime = int(np.ceil(5.0 / (blur * tau)))
    spec = BlurSpec(blur=blur, h_smooth=h_smooth, d_prime=d_prime, tau=tau, eta=1.0)
    return BlurSpec(blur=blur, h_smooth=h_smooth, d_prime=d_prime, tau=tau, eta=eta_bound(spec))


def apply_blurred_reflection(state: np.ndarray, reflection: FourierReflection, spectrum: Spectrum) -> np.ndarray:
    """Multiply each energy amplitude by the filter value at theta = E tau.

    Contractive: output norm never exceeds input norm. Costs 2*d' queries to
    the controlled evolution per call.
    """
    coeffs = to_energy_basis(spectrum, state.astype(complex))
    values = laurent_values(reflection.coefficients, spectrum.eigenvalues * spectrum.tau)
    return from_energy_basis(spectrum, coeffs * values)
