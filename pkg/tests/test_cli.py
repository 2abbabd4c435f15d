"""
End-to-end tests of the polykin command line on tiny configurations
"""

import json

import numpy as np
import pytest

import polykin
from config.run_config import RunConfig
from config.settings import AppConfig
from polykin import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, exit_code_for, main
from solver.relaxation import bimodal_initial_grid
from suites import canonical_wavevectors
from utils.errors import (
    CapacityError,
    ConfigurationError,
    ConsistencyError,
    DomainError,
    ModelError,
    PositivityError,
    PreconditionError,
    StiffnessError,
    UsageError,
)


def run(tmp_path, config_path, suite, out="out", *extra):
    out_dir = tmp_path / out
    code = main([suite, "--config", str(config_path), "--out", str(out_dir), *extra])
    return code, out_dir


def test_canonical_wavevectors():
    assert canonical_wavevectors(0) == [(0, 0, 0)]
    assert canonical_wavevectors(1) == [(0, 0, 0), (1, 0, 0)]
    assert canonical_wavevectors(2) == [(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 0, 0)]


@pytest.mark.parametrize("error,code", [
    (ConfigurationError("x"), EXIT_CONFIG),
    (UsageError("x"), EXIT_CONFIG),
    (DomainError("x"), EXIT_CONFIG),
    (CapacityError("x"), EXIT_CONFIG),
    (ModelError("x"), EXIT_FAIL),
    (StiffnessError("x"), EXIT_FAIL),
    (ConsistencyError("x"), EXIT_FAIL),
    (PositivityError("x"), EXIT_FAIL),
    (PreconditionError("x"), EXIT_FAIL),
])
def test_exit_code_mapping(error, code):
    assert exit_code_for(error) == code


def test_spectrum_run_writes_reports(tmp_path, tiny_run_config, write_run_file):
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "spectrum", "out", "--emit-plot-data")
    assert code in (EXIT_PASS, EXIT_FAIL)
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    assert summary["suite"] == "spectrum"
    assert summary["passed"] == (code == EXIT_PASS)
    assert [check["lemma"] for check in summary["checks"]] == ["spectrum"]
    metadata = json.loads((out_dir / "run_metadata.json").read_text(encoding="utf-8"))
    assert metadata["seed"] == 20240601
    assert metadata["fingerprint"] == summary["fingerprint"]

    gaps = (out_dir / "spectral_gaps.csv").read_text(encoding="utf-8").splitlines()
    assert gaps[0] == "k1,k2,k3,k_norm,gap"
    assert len(gaps) == 1 + len(canonical_wavevectors(1))
    assert (out_dir / "spectrum.csv").exists()
    assert (out_dir / "plot_data" / "spectral_gap_vs_k.csv").exists()


def test_spectrum_rerun_is_byte_identical(tmp_path, tiny_run_config, write_run_file):
    config_path = write_run_file(tiny_run_config)
    first_code, first = run(tmp_path, config_path, "spectrum", "first")
    second_code, second = run(tmp_path, config_path, "spectrum", "second")
    assert first_code == second_code
    for name in ("spectrum.csv", "spectral_gaps.csv", "summary.json", "run_metadata.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_seed_changes_the_fingerprint(tmp_path, tiny_run_config, write_run_file):
    config_path = write_run_file(tiny_run_config)
    _, first = run(tmp_path, config_path, "spectrum", "first")
    _, second = run(tmp_path, config_path, "spectrum", "second", "--seed", "7")
    first_meta = json.loads((first / "run_metadata.json").read_text(encoding="utf-8"))
    second_meta = json.loads((second / "run_metadata.json").read_text(encoding="utf-8"))
    assert second_meta["seed"] == 7
    assert first_meta["fingerprint"] != second_meta["fingerprint"]


def test_relax_equilibrium_run(tmp_path, tiny_run_config, write_run_file):
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "relax")
    assert code == EXIT_PASS
    trajectory = (out_dir / "trajectory.csv").read_text(encoding="utf-8").splitlines()
    assert trajectory[0] == "t,mass_defect,momentum_defect_norm,energy_defect,entropy,sup_norm,l2_distance"
    assert len(trajectory) == 1 + 1 + tiny_run_config["relax"]["n_steps"]


def test_stiff_relaxation_fails_with_exit_one(tmp_path, tiny_run_config, write_run_file):
    tiny_run_config["relax"]["dt"] = 5.0
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "relax")
    assert code == EXIT_FAIL
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    check = summary["checks"][0]
    assert check["status"] == "FAIL"
    assert "dt_nu_max" in check["details"]["diagnostics"]


def test_relax_bimodal_on_truncated_basis_fails_with_exit_one(tmp_path, tiny_run_config, write_run_file):
    tiny_run_config["relax"].update({"initial": "bimodal", "gamma": 0.55, "n_steps": 2})
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "relax")
    assert code == EXIT_FAIL
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    check = summary["checks"][0]
    assert check["lemma"] == "relaxation"
    assert check["status"] == "FAIL"
    diagnostics = check["details"]["diagnostics"]
    assert diagnostics["negative_mass"] > diagnostics["negative_mass_tol"]


def test_relax_bimodal_with_default_basis(tmp_path, tiny_run_config, write_run_file):
    tiny_run_config["basis"].update({"n_v": 4, "n_i": 2, "refined_n_v": 5, "refined_n_i": 3})
    tiny_run_config["relax"].update({"initial": "bimodal", "gamma": 0.55, "n_steps": 2})
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "relax")
    assert code in (EXIT_PASS, EXIT_FAIL)
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    assert summary["passed"] == (code == EXIT_PASS)
    check = summary["checks"][0]
    assert check["lemma"] == "relaxation"
    if "error" not in check["details"]:
        assert check["details"]["initial"] == "bimodal"
        assert check["details"]["max_negative_mass"] <= 1e-3
        assert len((out_dir / "trajectory.csv").read_text(encoding="utf-8").splitlines()) == 1 + 1 + 2


def test_shipped_defaults_relax_bimodal():
    config = RunConfig.from_yaml(AppConfig().DEFAULT_CONFIG_PATH, suite="relax")
    assert config.relax.initial == "bimodal"
    grid = bimodal_initial_grid(config.model, config.quad, config.relax.gamma)
    assert np.all(grid.distribution() > 0)


def test_verify_runs_selected_checks(tmp_path, tiny_run_config, write_run_file):
    tiny_run_config["verify"] = {"checks": ["prop_4_1", "lemma_4_3"]}
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "verify")
    assert code in (EXIT_PASS, EXIT_FAIL)
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    assert [check["lemma"] for check in summary["checks"]] == ["prop_4_1", "lemma_4_3"]
    assert all(check["status"] in ("PASS", "FAIL") for check in summary["checks"])
    assert (out_dir / "prop_4_1.csv").exists()
    assert (out_dir / "prop_4_1_cross_validation.csv").exists()
    header = (out_dir / "prop_4_1_cross_validation.csv").read_text(encoding="utf-8").splitlines()[0].split(",")
    assert {"difference", "tolerance", "agrees"} <= set(header)


def test_decay_writes_report(tmp_path, tiny_run_config, write_run_file):
    tiny_run_config["decay"] = {
        "n_iters": 2, "picard_n_hermite": 3, "picard_n_laguerre": 2, "picard_samples": 8,
        "mode_wavevectors": [[1, 0, 0]], "mode_times": 11,
        "torus_cells": 2, "torus_n_hermite": 3, "torus_n_laguerre": 2, "torus_steps": 2, "torus_samples": 500,
    }
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "decay")
    assert code in (EXIT_PASS, EXIT_FAIL)
    report = json.loads((out_dir / "decay_report.json").read_text(encoding="utf-8"))
    assert set(report) == {"T1", "sup_norm_series", "contraction_ratios", "lambda_fit", "modes"}
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    assert [check["lemma"] for check in summary["checks"]] == ["picard", "modes", "torus"]
    assert (out_dir / "modes.csv").exists()
    assert (out_dir / "torus.csv").exists()


@pytest.mark.parametrize("section,key,value", [
    ("model", "alpha", 3.0),
    ("basis", "n_v", 0),
    ("quadrature", "mc_samples", -1),
])
def test_invalid_configuration_exits_two(tmp_path, tiny_run_config, write_run_file, section, key, value):
    tiny_run_config[section][key] = value
    code, out_dir = run(tmp_path, write_run_file(tiny_run_config), "spectrum")
    assert code == EXIT_CONFIG
    assert not (out_dir / "summary.json").exists()


def test_missing_config_exits_two(tmp_path):
    code, _ = run(tmp_path, tmp_path / "absent.yaml", "verify")
    assert code == EXIT_CONFIG


def test_unknown_suite_exits_two(tmp_path, tiny_run_config, write_run_file, capsys):
    code = main(["plot", "--config", str(write_run_file(tiny_run_config))])
    assert code == 2
    assert "invalid choice" in capsys.readouterr().err


def test_basis_capacity_exits_two(tmp_path, tiny_run_config, write_run_file, monkeypatch):
    monkeypatch.setenv("POLYKIN_MAX_BASIS_SIZE", "10")
    code, _ = run(tmp_path, write_run_file(tiny_run_config), "spectrum")
    assert code == EXIT_CONFIG


def test_environment_out_dir(tmp_path, tiny_run_config, write_run_file, monkeypatch):
    monkeypatch.setenv("POLYKIN_OUT_DIR", str(tmp_path / "from_env"))
    code = main(["spectrum", "--config", str(write_run_file(tiny_run_config))])
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert (tmp_path / "from_env" / "summary.json").exists()


def test_module_loads_environment_file():
    assert callable(polykin.load_dotenv)
