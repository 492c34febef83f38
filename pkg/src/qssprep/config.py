"""Experiment configuration: JSON schema, parsing, validation."""

import json
from dataclasses import dataclass, field

from .ising import DENSE_QUBIT_CAP, IsingParams

SCHEMA_VERSION = 1

ANALYSES = ("populations", "fidelity_sweep", "entropy", "dynamics", "shadows")


class ConfigError(ValueError):
    """Invalid or unparseable experiment configuration."""


@dataclass
class ExperimentConfig:
    model: IsingParams
    initial_z: list
    analyses: list
    seed: int
    delta_sq: float = 1e-3
    p_star_factor: float = 0.1
    blur: dict = None            # None means ideal reflections
    windows: dict = None
    sweep: dict = None
    dynamics: dict = None
    shadows: dict = None
    out: str = None
    raw: dict = field(default_factory=dict)


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def parse_config(data: dict) -> ExperimentConfig:
    _require(isinstance(data, dict), "config root must be a JSON object")
    version = data.get("schema_version")
    _require(version == SCHEMA_VERSION, f"schema_version must be {SCHEMA_VERSION}, got {version!r}")

    model = data.get("model", {})
    _require(isinstance(model, dict) and "n" in model, "model must carry at least n")
    n = model["n"]
    _require(isinstance(n, int) and 2 <= n <= DENSE_QUBIT_CAP, f"model.n must be an integer in [2, {DENSE_QUBIT_CAP}]")
    params = IsingParams(n=n, g=float(model.get("g", -1.05)), h_field=float(model.get("h_field", 0.5)))

    initial_z = data.get("initial_z", [0.0])
    _require(isinstance(initial_z, list) and initial_z, "initial_z must be a nonempty list")
    initial_z = [float(z) for z in initial_z]

    analyses = data.get("analyses", [])
    _require(isinstance(analyses, list) and analyses, "analyses must be a nonempty list")
    for name in analyses:
        _require(name in ANALYSES, f"unknown analysis {name!r}; valid: {', '.join(ANALYSES)}")

    search = data.get("search", {})
    delta_sq = float(search.get("delta_sq", 1e-3))
    _require(0.0 < delta_sq < 1.0, f"search.delta_sq must lie in (0, 1), got {delta_sq}")
    p_star_factor = float(search.get("p_star_factor", 0.1))
    _require(p_star_factor > 0.0, f"search.p_star_factor must be positive, got {p_star_factor}")

    blur = data.get("blur", "ideal")
    if blur == "ideal":
        blur = None
    else:
        _require(isinstance(blur, dict), 'blur must be "ideal" or an object with b / h_smooth')
        _require(float(blur.get("b", 1.0)) > 0, "blur.b must be positive")
        _require(float(blur.get("h_smooth", 8.0)) > 0, "blur.h_smooth must be positive")
        blur = {"b": float(blur.get("b", 1.0)), "h_smooth": float(blur.get("h_smooth", 8.0))}

    windows = data.get("windows")
    if windows is not None:
        _require(isinstance(windows, dict), "windows must be an object")
        has_explicit = ("centers" in windows or "center_fracs" in windows) and (
            "width" in windows or "width_frac" in windows
        )
        has_partition = "partition_width" in windows or "partition_width_frac" in windows
        _require(has_explicit or has_partition, "windows needs centers+width (possibly _frac) or partition_width")

    sweep = data.get("sweep")
    if sweep is not None:
        _require(isinstance(sweep, dict), "sweep must be an object")
        _require(sweep.get("width_fracs"), "sweep.width_fracs must be a nonempty list")
        if "fidelity_sweep" in analyses:
            _require(sweep.get("b_values"), "sweep.b_values must be a nonempty list for fidelity_sweep")

    if "fidelity_sweep" in analyses or "entropy" in analyses:
        _require(sweep is not None, "fidelity_sweep and entropy analyses need a sweep section")
    if "populations" in analyses or "dynamics" in analyses:
        _require(windows is not None, "populations and dynamics analyses need a windows section")

    dynamics = data.get("dynamics", {})
    shadows = data.get("shadows", {})
    if "shadows" in analyses:
        _require(int(shadows.get("samples", 20000)) > 0, "shadows.samples must be positive")

    seed = data.get("seed")
    _require(isinstance(seed, int), "seed must be an integer")

    return ExperimentConfig(
        model=params,
        initial_z=initial_z,
        analyses=list(analyses),
        seed=seed,
        delta_sq=delta_sq,
        p_star_factor=p_star_factor,
        blur=blur,
        windows=windows,
        sweep=sweep,
        dynamics=dict(dynamics),
        shadows=dict(shadows),
        out=data.get("out"),
        raw=data,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)
