"""Numerical toolkit for preparing and analysing narrow energy-window states
of a spin chain with a fixed-point amplitude amplification routine."""

from .analysis import (
    fidelity,
    offdiag_element,
    reduced_density_matrix,
    site_average_z,
    von_neumann_entropy,
    window_component,
    window_populations,
)
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .ising import IsingParams, Spectrum, build_ising, choose_tau, diagonalize, evolve
from .reconstruct import (
    QssDecomposition,
    WindowPartition,
    dephasing_bound,
    partition_windows,
    qss_decompose,
    reconstruct_expectation,
    reconstruct_rdm,
    trace_distance,
)
from .search import (
    EmptyWindowError,
    PreparationResult,
    SearchPlan,
    grover_iterate,
    make_search_plan,
    run_fp_search,
    search_degree,
    search_phases,
)
from .shadows import sample_shadow_batch, shadow_reconstruct, shadow_stderr
from .states import BlochVector, product_state, reflect_about_state, solve_bloch
from .windows import (
    BlurSpec,
    EnergyWindow,
    FourierReflection,
    blur_coefficients,
    blur_params,
    eta_bound,
    window_mask,
)

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "BlurSpec",
    "ConfigError",
    "EmptyWindowError",
    "EnergyWindow",
    "ExperimentConfig",
    "FourierReflection",
    "IsingParams",
    "PreparationResult",
    "QssDecomposition",
    "SearchPlan",
    "Spectrum",
    "WindowPartition",
    "blur_coefficients",
    "blur_params",
    "build_ising",
    "choose_tau",
    "dephasing_bound",
    "diagonalize",
    "eta_bound",
    "evolve",
    "fidelity",
    "grover_iterate",
    "load_config",
    "make_search_plan",
    "offdiag_element",
    "parse_config",
    "partition_windows",
    "product_state",
    "qss_decompose",
    "reconstruct_expectation",
    "reconstruct_rdm",
    "reduced_density_matrix",
    "reflect_about_state",
    "run_fp_search",
    "sample_shadow_batch",
    "search_degree",
    "search_phases",
    "shadow_reconstruct",
    "shadow_stderr",
    "site_average_z",
    "solve_bloch",
    "trace_distance",
    "von_neumann_entropy",
    "window_component",
    "window_mask",
    "window_populations",
]
