"""
Shared fixtures: default model parameters, a small quadrature and small bases
"""

import sys
from pathlib import Path

import pytest
import yaml

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from gas_model.params import ModelParams  # noqa: E402
from gas_model.quadrature import QuadratureSpec  # noqa: E402
from linearized.basis import build_basis  # noqa: E402


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def small_quad():
    return QuadratureSpec(
        n_hermite=4, n_laguerre=3, n_radial=32, n_energy=8, n_jacobi=8, n_eta=16,
        n_outer_radial=12, n_outer_polar=6, n_outer_azimuth=4, n_outer_energy=6,
        mc_samples=20_000, mc_block=4096, time_panels=2, time_nodes=3,
    )


@pytest.fixture
def small_basis(params):
    return build_basis(2, 1, params)


@pytest.fixture
def tiny_run_config():
    """Run-file mapping small enough for CLI tests"""
    return {
        "model": {"delta": 2.0, "alpha": 1.0},
        "quadrature": {"n_hermite": 4, "n_laguerre": 3, "mc_samples": 4000, "mc_block": 2048},
        "basis": {"n_v": 2, "n_i": 1, "refined_n_v": 3, "refined_n_i": 1, "weak_form_samples": 8000},
        "grids": {"k_max": 1},
        "relax": {"initial": "equilibrium", "dt": 0.01, "n_steps": 3, "samples_per_step": 2000},
    }


@pytest.fixture
def write_run_file(tmp_path):
    """Write a mapping to a YAML file under tmp_path and return its path"""
    def write(data, name="run.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path
    return write


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Keep environment overrides and log files out of the tests"""
    for name in ("POLYKIN_SEED", "POLYKIN_OUT_DIR", "POLYKIN_MAX_BASIS_SIZE"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("POLYKIN_LOGS_DIR", str(tmp_path / "logs"))
