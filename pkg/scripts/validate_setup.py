#!/usr/bin/env python
"""
Setup check for polykin

Confirms, before a long run, that the numerical stack imports, that the
default run file resolves for every suite, that the configured bases fit
the capacity limit and that the Gauss phase rule reproduces the
equilibrium moments.

Usage:
    python scripts/validate_setup.py [--config run.yaml]
"""

import argparse
import importlib
import sys
from pathlib import Path
from typing import Callable, List, Optional, Tuple

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

STACK = ("numpy", "scipy", "pandas", "yaml", "dotenv")
SUITES = ("verify", "spectrum", "relax", "decay")

Finding = Tuple[bool, str]


def stack_findings() -> List[Finding]:
    """Import every package of the numerical stack"""
    findings = []
    for name in STACK:
        try:
            module = importlib.import_module(name)
        except ImportError as e:
            findings.append((False, f"{name} not importable: {e}"))
            continue
        findings.append((True, f"{name} {getattr(module, '__version__', '')}".rstrip()))
    return findings


def config_findings(path: Optional[Path] = None) -> List[Finding]:
    """Resolve the run file for each suite"""
    from config.run_config import RunConfig
    from config.settings import AppConfig
    from utils.errors import PolykinError

    app_config = AppConfig()
    path = path or app_config.DEFAULT_CONFIG_PATH
    try:
        configs = [RunConfig.from_yaml(path, suite=suite, app_config=app_config) for suite in SUITES]
    except PolykinError as e:
        return [(False, f"{path.name}: {e}")]
    return [(True, f"{path.name} resolves for {config.suite} (fingerprint {config.fingerprint()[:12]})")
            for config in configs]


def capacity_findings(path: Optional[Path] = None) -> List[Finding]:
    """Working and refined bases against POLYKIN_MAX_BASIS_SIZE"""
    from config.run_config import RunConfig
    from config.settings import AppConfig
    from linearized.basis import SpectralBasis

    app_config = AppConfig()
    config = RunConfig.from_yaml(path or app_config.DEFAULT_CONFIG_PATH, suite="verify", app_config=app_config)
    section = config.basis
    findings = []
    for label, n_v, n_i, cap in (("working", section.n_v, section.n_i, section.total_degree),
                                 ("refined", section.refined_n_v, section.refined_n_i, None)):
        size = SpectralBasis(n_v=n_v, n_i=n_i, params=config.model, total_degree=cap).size
        findings.append((size <= app_config.MAX_BASIS_SIZE,
                         f"{label} basis n_v={n_v}, n_i={n_i}: {size} functions "
                         f"(limit {app_config.MAX_BASIS_SIZE})"))
    return findings


def quadrature_findings(path: Optional[Path] = None) -> List[Finding]:
    """Phase rule of the run file against E_M[1] = 1 and E_M[|v|² + 2I] = 3 + δ"""
    import numpy as np

    from config.run_config import RunConfig
    from config.settings import AppConfig
    from gas_model.quadrature import phase_rule

    app_config = AppConfig()
    config = RunConfig.from_yaml(path or app_config.DEFAULT_CONFIG_PATH, suite="verify", app_config=app_config)
    params, quad = config.model, config.quad
    rule = phase_rule(quad.n_hermite, quad.n_laguerre, params)
    mass = float(np.sum(rule.weights))
    energy = float(rule.weights @ (np.sum(rule.v ** 2, axis=1) + 2 * rule.i))
    error = max(abs(mass - 1.0), abs(energy - (3 + params.delta)) / (3 + params.delta))
    return [(error < 1e-12, f"phase rule {quad.n_hermite}x{quad.n_laguerre} at delta={params.delta}: "
                            f"moment error {error:.1e}")]


def logs_findings() -> List[Finding]:
    """The log directory must be writable"""
    from config.settings import AppConfig

    logs_dir = AppConfig().LOGS_DIR
    try:
        logs_dir.mkdir(parents=True, exist_ok=True)
        marker = logs_dir / ".write_check"
        marker.write_text("ok", encoding="utf-8")
        marker.unlink()
    except OSError as e:
        return [(False, f"log directory {logs_dir} not writable: {e}")]
    return [(True, f"log directory {logs_dir}")]


def run_checks(path: Optional[Path] = None) -> bool:
    """Print every finding; True when none failed"""
    sections: List[Tuple[str, Callable[[], List[Finding]]]] = [
        ("stack", stack_findings),
        ("run file", lambda: config_findings(path)),
        ("capacity", lambda: capacity_findings(path)),
        ("quadrature", lambda: quadrature_findings(path)),
        ("logs", logs_findings),
    ]
    ok = True
    for title, collect in sections:
        try:
            findings = collect()
        except Exception as e:
            findings = [(False, f"{type(e).__name__}: {e}")]
        for passed, message in findings:
            print(f"[{'ok' if passed else 'FAIL'}] {title}: {message}")
            ok = ok and passed
    return ok


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Check that polykin is ready to run")
    parser.add_argument("--config", type=Path, default=None, help="Run file to check (defaults to polykin_defaults.yaml)")
    args = parser.parse_args(argv)
    return 0 if run_checks(args.config) else 1


if __name__ == "__main__":
    sys.exit(main())
