"""
Tests for environment settings and the YAML run configuration
"""

from pathlib import Path

import pytest

from config.run_config import DEFAULT_OUT_DIR, DEFAULT_SEED, VERIFY_CHECKS, RunConfig
from config.settings import AppConfig
from utils.errors import ConfigurationError


def test_defaults_file_loads():
    app_config = AppConfig()
    config = RunConfig.from_yaml(app_config.DEFAULT_CONFIG_PATH, suite="verify", app_config=app_config)
    assert config.suite == "verify"
    assert config.seed == DEFAULT_SEED
    assert config.out_dir == Path(DEFAULT_OUT_DIR)
    assert config.model.delta == 2.0
    assert list(config.verify.checks) == list(VERIFY_CHECKS)


def test_empty_mapping_takes_defaults():
    config = RunConfig.from_dict({}, suite="spectrum")
    assert config.quad.seed == DEFAULT_SEED
    assert config.basis.n_v == 4
    assert config.grids.k_max == 2


def test_seed_precedence(monkeypatch):
    data = {"seed": 5}
    assert RunConfig.from_dict(data, suite="relax").seed == 5
    monkeypatch.setenv("POLYKIN_SEED", "9")
    assert RunConfig.from_dict(data, suite="relax", app_config=AppConfig()).seed == 9
    assert RunConfig.from_dict(data, suite="relax", seed=11, app_config=AppConfig()).seed == 11


def test_out_dir_precedence(monkeypatch, tmp_path):
    data = {"out_dir": str(tmp_path / "file")}
    assert RunConfig.from_dict(data, suite="relax").out_dir == tmp_path / "file"
    monkeypatch.setenv("POLYKIN_OUT_DIR", str(tmp_path / "env"))
    assert RunConfig.from_dict(data, suite="relax", app_config=AppConfig()).out_dir == tmp_path / "env"
    assert RunConfig.from_dict(data, suite="relax", out_dir=str(tmp_path / "cli"),
                               app_config=AppConfig()).out_dir == tmp_path / "cli"


def test_non_integer_seed_override_is_ignored(monkeypatch):
    monkeypatch.setenv("POLYKIN_SEED", "abc")
    assert AppConfig().SEED_OVERRIDE is None


@pytest.mark.parametrize("data", [
    {"model": {"alpha": 3.0}},
    {"model": {"delta": 1.0}},
    {"basis": {"n_v": 0}},
    {"quadrature": {"n_hermite": 0}},
    {"quadrature": {"seed": 4}},
    {"thresholds": {"n_sigma": "three"}},
    {"relax": {"initial": "uniform"}},
    {"decay": {"mode_wavevectors": [[0, 0, 0]]}},
    {"decay": {"torus_cells": 9}},
    {"verify": {"checks": ["lemma_9_9"]}},
    {"grids": {"kw_energies": [200.0, 20.0]}},
    {"model": {"unknown": 1}},
    {"extras": {}},
    {"seed": -3},
    {"model": [1, 2]},
])
def test_invalid_configurations(data):
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict(data, suite="verify")


def test_suite_mismatch_is_rejected():
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"suite": "relax"}, suite="verify")
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({})


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigurationError):
        RunConfig.from_yaml(tmp_path / "absent.yaml", suite="verify")
    broken = tmp_path / "broken.yaml"
    broken.write_text("model: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        RunConfig.from_yaml(broken, suite="verify")


def test_fingerprint_ignores_out_dir_but_not_seed(tmp_path):
    a = RunConfig.from_dict({}, suite="spectrum", out_dir=str(tmp_path / "a"))
    b = RunConfig.from_dict({}, suite="spectrum", out_dir=str(tmp_path / "b"))
    c = RunConfig.from_dict({}, suite="spectrum", seed=1)
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()


def test_with_suite():
    config = RunConfig.from_dict({}, suite="decay")
    assert config.with_suite("verify").suite == "verify"
    with pytest.raises(ConfigurationError):
        config.with_suite("plot")


def test_app_config_basis_limit_floor(monkeypatch):
    monkeypatch.setenv("POLYKIN_MAX_BASIS_SIZE", "2")
    assert AppConfig().MAX_BASIS_SIZE == 5


def test_app_config_logging(monkeypatch, tmp_path):
    monkeypatch.setenv("LOG_LEVEL", "verbose")
    config = AppConfig()
    assert config.get_logging_config()["log_level"] == "INFO"
    assert config.get_logging_config()["log_dir"] == tmp_path / "logs"


def test_thresholds_gate_on_the_required_decay():
    thresholds = RunConfig.from_dict({}, suite="verify").thresholds
    assert thresholds.kw_slope_max == -0.125
    assert thresholds.negative_mass_tol == 1e-3
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"thresholds": {"kw_slope_slack": 0.05}}, suite="verify")


def test_mc_block_comes_from_the_run_file(monkeypatch):
    monkeypatch.setenv("POLYKIN_MC_BLOCK_SIZE", "17")
    assert not hasattr(AppConfig(), "MC_BLOCK_SIZE")
    config = RunConfig.from_dict({"quadrature": {"mc_block": 512}}, suite="verify", app_config=AppConfig())
    assert config.quad.mc_block == 512


def test_kw_points_needs_two_energies():
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"grids": {"kw_points": 1}}, suite="verify")
