import json
import os

import numpy as np
import pytest

from qssprep import cli, verify, windows
from qssprep.config import ConfigError, load_config, parse_config
from qssprep.experiments import PRESETS, energy_scale, preset_config, run_experiment
from qssprep.ising import IsingParams, choose_tau
from qssprep.search import search_degree
from qssprep.windows import blur_params


def base_config(**overrides):
    data = {
        "schema_version": 1,
        "model": {"n": 6},
        "initial_z": [0.0],
        "search": {"delta_sq": 1e-3, "p_star_factor": 0.1},
        "blur": {"b": 1.0},
        "windows": {"centers": [0.0, 0.8], "width": 1.0},
        "analyses": ["populations"],
        "seed": 3,
    }
    data.update(overrides)
    return data


def test_parse_config_defaults():
    config = parse_config(
        {
            "schema_version": 1,
            "model": {"n": 4},
            "initial_z": [0.0],
            "analyses": ["populations"],
            "windows": {"centers": [0.0], "width": 1.0},
            "blur": "ideal",
            "seed": 1,
        }
    )
    assert config.model == IsingParams(n=4)
    assert config.delta_sq == 1e-3
    assert config.p_star_factor == 0.1
    assert config.blur is None
    assert config.dynamics == {} and config.shadows == {}


@pytest.mark.parametrize(
    "mangle",
    [
        {"schema_version": 2},
        {"model": {}},
        {"model": {"n": 1}},
        {"model": {"n": 15}},
        {"model": {"n": "8"}},
        {"initial_z": []},
        {"analyses": []},
        {"analyses": ["spectroscopy"]},
        {"search": {"delta_sq": 1.0}},
        {"search": {"delta_sq": -0.1}},
        {"search": {"p_star_factor": 0.0}},
        {"blur": {"b": -1.0}},
        {"blur": 7},
        {"windows": {"width": 1.0}},
        {"windows": None, "analyses": ["populations"]},
        {"analyses": ["entropy"]},
        {"analyses": ["fidelity_sweep"], "sweep": {"width_fracs": [0.2]}},
        {"analyses": ["shadows"], "shadows": {"samples": 0}},
        {"seed": None},
        {"seed": "3"},
    ],
)
def test_parse_config_rejects(mangle):
    data = base_config(**mangle)
    data = {k: v for k, v in data.items() if v is not None or k not in mangle}
    with pytest.raises(ConfigError):
        parse_config(data)


def test_load_config_error_paths(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(str(bad))


def test_presets_parse_and_are_isolated():
    assert sorted(PRESETS) == ["fig2a", "fig2b", "fig2c", "fig2d"]
    for name in PRESETS:
        parse_config(preset_config(name))
    grabbed = preset_config("fig2a")
    grabbed["seed"] = 999
    grabbed["model"]["n"] = 2
    again = preset_config("fig2a")
    assert again["seed"] != 999
    assert again["model"]["n"] != 2
    with pytest.raises(KeyError):
        preset_config("fig9z")


def test_cli_presets_listing(capsys):
    assert cli.main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("fig2a", "fig2b", "fig2c", "fig2d"):
        assert f"{name}:" in out


def test_cli_run_argument_errors(tmp_path, capsys):
    assert cli.main(["run", "--config", "x.json", "--preset", "fig2a"]) == 2
    assert "not both" in capsys.readouterr().err
    assert cli.main(["run"]) == 2
    assert "required" in capsys.readouterr().err
    assert cli.main(["run", "--config", str(tmp_path / "nope.json")]) == 2
    assert "config error" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(base_config(schema_version=3)))
    assert cli.main(["run", "--config", str(bad)]) == 2
    assert "schema_version" in capsys.readouterr().err


def test_cli_reports_invariant_violation(tmp_path, capsys):
    cfg = tmp_path / "steep.json"
    cfg.write_text(json.dumps(base_config(initial_z=[0.95])))
    code = cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "invariant violation" in capsys.readouterr().err


def test_cli_run_is_deterministic(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(base_config()))
    out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
    assert cli.main(["run", "--config", str(cfg), "--out", out_a]) == 0
    assert cli.main(["run", "--config", str(cfg), "--out", out_b, "--jobs", "2"]) == 0
    status = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert status == {"analyses": ["populations"], "out": out_b}
    for name in ("manifest.json", "populations.csv"):
        with open(os.path.join(out_a, name), "rb") as fa, open(os.path.join(out_b, name), "rb") as fb:
            assert fa.read() == fb.read()


def test_cli_seed_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(base_config()))
    out = str(tmp_path / "o")
    assert cli.main(["run", "--config", str(cfg), "--out", out, "--seed", "123"]) == 0
    capsys.readouterr()
    with open(os.path.join(out, "manifest.json")) as handle:
        manifest = json.load(handle)
    assert manifest["seed"] == 123
    assert manifest["config"]["seed"] == 123


def test_manifest_parameters_rederive(tmp_path):
    config = parse_config(base_config())
    manifest = run_experiment(config, str(tmp_path / "o"))
    params = IsingParams(n=6)
    assert manifest["derived"]["tau"] == choose_tau(params)
    assert manifest["derived"]["energy_scale"] == energy_scale(params)
    runs = manifest["analyses"]["populations"]["runs"]
    assert len(runs) == 2
    for run in runs:
        assert run["p_star"] == 0.1 * run["window_width"] / energy_scale(params)
        assert run["d"] == search_degree(run["delta"], run["p_star"])
        blur = blur_params(run["delta"], run["d"], choose_tau(params), b=run["b"], h_smooth=run["h_smooth"])
        assert run["d_prime"] == blur.d_prime
        assert run["eta"] == blur.eta
        assert run["blur_width"] == blur.blur
        assert run["population_error"] <= config.delta_sq


def test_written_floats_round_trip(tmp_path):
    config = parse_config(base_config())
    run_experiment(config, str(tmp_path / "o"))
    with open(tmp_path / "o" / "populations.csv") as handle:
        header = handle.readline().strip().split(",")
        assert header[0] == "initial_z"
        total = 0.0
        for line in handle:
            cells = line.strip().split(",")
            for cell in cells:
                value = float(cell)
                assert format(value, ".17g") == cell
            total += float(cells[-1])
    # two runs, each preparing a normalized state histogrammed over the band
    assert total == pytest.approx(2.0, abs=1e-9)


def test_verify_suite_green_and_cli_exit_codes(capsys):
    assert verify.run_verification(n=6) is True
    assert cli.main(["verify", "--n", "6"]) == 0
    out = capsys.readouterr().out
    assert "ok" in out and "FAIL" not in out


def test_verify_catches_a_broken_contraction_bound(monkeypatch, capsys):
    # sabotage the tail bound; the contraction check must notice
    monkeypatch.setattr(windows, "eta_bound", lambda spec: 1.0)
    assert verify.run_verification(n=6) is False
    assert cli.main(["verify", "--n", "6"]) == 1
    assert "FAIL" in capsys.readouterr().out
