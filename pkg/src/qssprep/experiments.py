"""Experiment runner, figure presets, and the self-check suite.

Outputs are a manifest.json plus one CSV per requested analysis, written with
full 17-digit floats and sorted keys so identical (config, seed) pairs give
byte-identical files. Window centers and widths may be specified as fractions
of the energy spread sqrt(<H^2>) of the zero-energy product states, which
keeps one config meaningful across chain sizes.
"""

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from math import sqrt

import numpy as np

from . import analysis, reconstruct, shadows, states, windows
from .config import ExperimentConfig
from .ising import IsingParams, build_ising, diagonalize, energy_moments, evolve, to_energy_basis
from .search import make_search_plan, run_fp_search

# Window grid of the reference study, expressed as fractions of sqrt(<H^2>).
# The absolute grid there was centers -6..6 step 3 and widths 1..4 at a spread
# of sqrt(24.345).
_FRAC = 0.20267337071094217   # one width unit as a fraction of the spread
_CENTER_FRACS = [-6 * _FRAC, -3 * _FRAC, 0.0, 3 * _FRAC, 6 * _FRAC]

# Nine log-spaced blur strengths covering 0.25..4. A sparse spectrum makes
# single (width, b) cells lottery-like (one strong eigenstate inside the
# smoothing band can dominate), so the scaling fit pools a denser grid.
_B_GRID = [0.25 * 2 ** (j / 2) for j in range(9)]

PRESETS = {
    "fig2a": {
        "description": "populations of five blurred-search windows across the spectrum",
        "config": {
            "schema_version": 1,
            "model": {"n": 10, "g": -1.05, "h_field": 0.5},
            "initial_z": [0.0],
            "windows": {"center_fracs": _CENTER_FRACS, "width_frac": _FRAC},
            "blur": {"b": 1.0, "h_smooth": 8.0},
            "search": {"delta_sq": 1e-3, "p_star_factor": 0.1},
            "analyses": ["populations"],
            "seed": 11,
        },
    },
    "fig2b": {
        "description": "fidelity deficit and failure probability against B/W_A over a width x blur grid",
        "config": {
            "schema_version": 1,
            "model": {"n": 10, "g": -1.05, "h_field": 0.5},
            "initial_z": [0.0],
            "sweep": {
                "width_fracs": [_FRAC, 2 * _FRAC, 3 * _FRAC, 4 * _FRAC],
                "b_values": _B_GRID,
            },
            "blur": {"b": 1.0, "h_smooth": 8.0},
            "search": {"delta_sq": 1e-3, "p_star_factor": 0.1},
            "analyses": ["fidelity_sweep"],
            "seed": 11,
        },
    },
    "fig2c": {
        "description": "site-averaged <Z> of the central window component as the width shrinks",
        "config": {
            "schema_version": 1,
            "model": {"n": 10, "g": -1.05, "h_field": 0.5},
            "initial_z": [0.0, -0.5, 0.5],
            "sweep": {"width_fracs": [8 * _FRAC, 4 * _FRAC, 2 * _FRAC, _FRAC]},
            "blur": "ideal",
            "search": {"delta_sq": 1e-3, "p_star_factor": 0.1},
            "analyses": ["entropy"],
            "seed": 11,
        },
    },
    "fig2d": {
        "description": "half-chain entanglement entropy of the central window component as the width shrinks",
        "config": {
            "schema_version": 1,
            "model": {"n": 10, "g": -1.05, "h_field": 0.5},
            "initial_z": [0.0, -0.5, 0.5],
            "sweep": {"width_fracs": [8 * _FRAC, 4 * _FRAC, 2 * _FRAC, _FRAC]},
            "blur": "ideal",
            "search": {"delta_sq": 1e-3, "p_star_factor": 0.1},
            "analyses": ["entropy"],
            "seed": 11,
        },
    },
}


def preset_config(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; valid: {', '.join(sorted(PRESETS))}")
    return json.loads(json.dumps(PRESETS[name]["config"]))


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _as_float_dict(obj):
    if isinstance(obj, dict):
        return {k: _as_float_dict(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_as_float_dict(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def energy_scale(params: IsingParams) -> float:
    """sqrt(<H^2>) of the zero-energy product states, the frac unit."""
    return sqrt(params.n * (params.g**2 + params.h_field**2))


def _resolve_windows(cfg_windows: dict, scale: float):
    if "centers" in cfg_windows:
        centers = [float(c) for c in cfg_windows["centers"]]
    else:
        centers = [float(f) * scale for f in cfg_windows["center_fracs"]]
    if "width" in cfg_windows:
        width = float(cfg_windows["width"])
    else:
        width = float(cfg_windows["width_frac"]) * scale
    return [windows.EnergyWindow(center=c, width=width) for c in centers]


def _prepare(psi, window, config: ExperimentConfig, spectrum, scale, b_override=None):
    """One search run; returns (result, derived-parameter dict)."""
    delta = sqrt(config.delta_sq)
    p_star = config.p_star_factor * window.width / scale
    mode = "ideal" if config.blur is None and b_override is None else "blurred"
    plan = make_search_plan(delta, p_star, mode=mode)
    blur = None
    derived = {
        "window_center": window.center,
        "window_width": window.width,
        "delta": delta,
        "p_star": p_star,
        "d": plan.d,
        "mode": mode,
    }
    if mode == "blurred":
        b = b_override if b_override is not None else config.blur["b"]
        h_smooth = (config.blur or {}).get("h_smooth", 8.0)
        blur = windows.blur_params(delta, plan.d, spectrum.tau, b=b, h_smooth=h_smooth)
        derived.update({"b": b, "h_smooth": h_smooth, "blur_width": blur.blur,
                        "d_prime": blur.d_prime, "eta": blur.eta})
    result = run_fp_search(psi, window, plan, spectrum, blur=blur)
    derived.update({
        "p_a": result.p_a,
        "success_prob": result.success_prob,
        "population_error": result.population_error,
        "fidelity_vs_ideal": result.fidelity_vs_ideal,
        "q_h": result.q_h,
        "q_psi": result.q_psi,
    })
    return result, derived


def _initial_states(config: ExperimentConfig):
    out = []
    for z in config.initial_z:
        bloch = states.solve_bloch(z, config.model)
        out.append((z, states.product_state(bloch, config.model.n)))
    return out


def _run_populations(config, spectrum, scale, psi_list, out_dir, jobs):
    wins = _resolve_windows(config.windows, scale)
    bins = np.linspace(spectrum.eigenvalues[0], spectrum.eigenvalues[-1], 61)
    tasks = [(z, psi, win) for z, psi in psi_list for win in wins]

    def one(task):
        z, psi, win = task
        result, derived = _prepare(psi, win, config, spectrum, scale)
        coeffs = np.abs(to_energy_basis(spectrum, result.state)) ** 2
        hist, _ = np.histogram(spectrum.eigenvalues, bins=bins, weights=coeffs)
        derived["initial_z"] = z
        return derived, hist

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(one, tasks))
    rows = []
    for (derived, hist), (z, _, win) in zip(outcomes, tasks):
        for lo, hi, weight in zip(bins[:-1], bins[1:], hist):
            rows.append((z, win.center, win.width, lo, hi, weight))
    write_csv(
        os.path.join(out_dir, "populations.csv"),
        ["initial_z", "window_center", "window_width", "bin_lo", "bin_hi", "population"],
        rows,
    )
    return {"runs": [d for d, _ in outcomes]}


def _run_fidelity_sweep(config, spectrum, scale, psi_list, out_dir, jobs):
    width_fracs = [float(f) for f in config.sweep["width_fracs"]]
    b_values = [float(b) for b in config.sweep["b_values"]]
    _, psi = psi_list[0]
    tasks = [(f, b) for f in width_fracs for b in b_values]

    def one(task):
        frac, b = task
        win = windows.EnergyWindow(center=0.0, width=frac * scale)
        result, derived = _prepare(psi, win, config, spectrum, scale, b_override=b)
        return derived

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        derived_list = list(pool.map(one, tasks))
    rows = []
    for derived in derived_list:
        ratio = derived["blur_width"] / derived["window_width"]
        rows.append((
            derived["window_width"], derived["b"], derived["blur_width"], ratio,
            1.0 - derived["fidelity_vs_ideal"], 1.0 - derived["success_prob"],
            derived["d"], derived["d_prime"],
        ))
    write_csv(
        os.path.join(out_dir, "fidelity_sweep.csv"),
        ["window_width", "b", "blur_width", "blur_over_width", "one_minus_fidelity", "p_fail", "d", "d_prime"],
        rows,
    )
    ratios = np.array([r[3] for r in rows])
    deficits = np.array([r[4] for r in rows])
    fails = np.array([r[5] for r in rows])
    slope_fid = float(np.polyfit(np.log(ratios), np.log(np.maximum(deficits, 1e-300)), 1)[0])
    slope_fail = float(np.polyfit(np.log(ratios), np.log(np.maximum(fails, 1e-300)), 1)[0])
    return {
        "runs": derived_list,
        "slope_one_minus_fidelity": slope_fid,
        "slope_p_fail": slope_fail,
    }


def _run_entropy(config, spectrum, scale, psi_list, out_dir, jobs):
    width_fracs = [float(f) for f in config.sweep["width_fracs"]]
    n = config.model.n
    half = tuple(range(n // 2))
    rows, runs = [], []
    for z, psi in psi_list:
        for frac in width_fracs:
            win = windows.EnergyWindow(center=0.0, width=frac * scale)
            component = analysis.window_component(psi, win, spectrum)
            avg_z = analysis.site_average_z(component, n)
            entropy = analysis.von_neumann_entropy(analysis.reduced_density_matrix(component, half, n))
            rows.append((z, win.width, avg_z, entropy))
            runs.append({"initial_z": z, "window_width": win.width,
                         "site_avg_z": avg_z, "entropy_nats": entropy})
    write_csv(
        os.path.join(out_dir, "entropy.csv"),
        ["initial_z", "window_width", "site_avg_z", "entropy_nats"],
        rows,
    )
    spreads = {}
    for frac in width_fracs:
        width = frac * scale
        values = [r["site_avg_z"] for r in runs if r["window_width"] == width]
        spreads[_fmt(width)] = max(values) - min(values)
    return {"runs": runs, "z_spread_by_width": spreads}


def _run_dynamics(config, spectrum, scale, psi_list, out_dir, jobs):
    n = config.model.n
    win_section = config.windows or {}
    if "partition_width" in win_section:
        width = float(win_section["partition_width"])
    else:
        width = float(win_section.get("partition_width_frac", _FRAC)) * scale
    section = config.dynamics or {}
    max_wt = float(section.get("max_wt", 0.3))
    points = int(section.get("time_points", 25))
    _, psi = psi_list[0]
    partition = reconstruct.partition_windows(spectrum, width)
    decomp = reconstruct.qss_decompose(psi, partition, spectrum)
    z0 = analysis.z_diagonal(0, n)
    elements = reconstruct.matrix_elements(decomp, z0)
    times = np.linspace(0.0, max_wt / width, points)
    rows = []
    for t in times:
        evolved = evolve(spectrum, psi, t)
        exact = float(np.real(np.vdot(evolved, z0 * evolved)))
        recon = reconstruct.reconstruct_expectation(decomp, z0, t, elements=elements)
        rows.append((t, exact, recon, reconstruct.dephasing_bound(width, t)))
    write_csv(os.path.join(out_dir, "dynamics.csv"), ["t", "exact", "reconstructed", "bound"], rows)
    worst = max(abs(r[1] - r[2]) for r in rows)
    return {"partition_width": width, "windows_kept": int(decomp.weights.shape[0]),
            "dropped_weight": decomp.dropped_weight, "max_reconstruction_error": worst}


def _run_shadows(config, spectrum, scale, psi_list, out_dir, jobs):
    n = config.model.n
    section = config.shadows or {}
    region = tuple(section.get("region", (0, 1)))
    samples = int(section.get("samples", 20000))
    _, psi = psi_list[0]
    has_explicit = config.windows is not None and (
        "centers" in config.windows or "center_fracs" in config.windows
    )
    if has_explicit:
        win = _resolve_windows(config.windows, scale)[0]
        state = analysis.window_component(psi, win, spectrum)
    else:
        state = psi
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    batch = shadows.sample_shadow_batch(state, region, samples, rng)
    estimate = shadows.shadow_reconstruct(batch)
    stderr = shadows.shadow_stderr(batch)
    exact = analysis.reduced_density_matrix(state, region, n)
    rows = []
    size = estimate.shape[0]
    for i in range(size):
        for j in range(size):
            rows.append((i, j, estimate[i, j].real, estimate[i, j].imag,
                         exact[i, j].real, exact[i, j].imag, stderr[i, j]))
    write_csv(
        os.path.join(out_dir, "shadows.csv"),
        ["row", "col", "est_re", "est_im", "exact_re", "exact_im", "stderr"],
        rows,
    )
    sample_rows = [
        (0, k, "".join(s.bases), "".join("+" if o > 0 else "-" for o in s.outcomes),
         "" if s.register_axis is None else s.register_axis,
         "" if s.register_outcome is None else s.register_outcome)
        for k, s in enumerate(shadows.expand_records(batch))
    ]
    write_csv(
        os.path.join(out_dir, "shadow_samples.csv"),
        ["stream_id", "sample_id", "bases", "outcomes", "register_axis", "register_outcome"],
        sample_rows,
    )
    deviation = float(np.max(np.abs(estimate - exact) / stderr))
    return {"region": list(region), "samples": samples, "max_deviation_over_stderr": deviation}


_ANALYSIS_RUNNERS = {
    "populations": _run_populations,
    "fidelity_sweep": _run_fidelity_sweep,
    "entropy": _run_entropy,
    "dynamics": _run_dynamics,
    "shadows": _run_shadows,
}


def run_experiment(config: ExperimentConfig, out_dir: str, jobs: int = 1) -> dict:
    """Run all requested analyses; returns the manifest written to out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    params = config.model
    spectrum = diagonalize(build_ising(params), params)
    scale = energy_scale(params)
    psi_list = _initial_states(config)
    for z, psi in psi_list:
        mean, _ = energy_moments(spectrum, psi)
        if abs(mean) > 1e-8:
            raise AssertionError(f"initial state z={z} has <H> = {mean:.3e}, expected 0")

    manifest = {
        "schema_version": config.raw.get("schema_version", 1),
        "config": _as_float_dict(config.raw),
        "derived": {
            "tau": spectrum.tau,
            "energy_scale": scale,
            "bandwidth": float(spectrum.eigenvalues[-1] - spectrum.eigenvalues[0]),
            "ground_energy": float(spectrum.eigenvalues[0]),
        },
        "seed": config.seed,
        "analyses": {},
    }
    for name in config.analyses:
        fragment = _ANALYSIS_RUNNERS[name](config, spectrum, scale, psi_list, out_dir, jobs)
        manifest["analyses"][name] = _as_float_dict(fragment)

    with open(os.path.join(out_dir, "manifest.json"), "w") as handle:
        json.dump(_as_float_dict(manifest), handle, sort_keys=True, indent=2)
        handle.write("\n")
    return manifest
