"""
Run Configuration

Loads the YAML run file of a suite and resolves seed and output directory
overrides. Precedence: command-line flag, environment, file, default.
"""

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar

import yaml

from config.settings import AppConfig
from gas_model.params import ModelParams
from gas_model.quadrature import QuadratureSpec
from utils.errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

SUITES = ("verify", "spectrum", "relax", "decay")
VERIFY_CHECKS = ("lemma_2_1", "lemma_2_2", "lemma_2_3", "prop_4_1", "prop_4_2", "lemma_4_3",
                 "collision_invariants", "kernel_oracles")
DEFAULT_SEED = 20240601
DEFAULT_OUT_DIR = "polykin_out"

Section = TypeVar("Section")


def _positive(section: str, **values):
    for name, value in values.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            raise ConfigurationError(f"{section}.{name} must be a positive number, got {value!r}")


def _positive_int(section: str, **values):
    for name, value in values.items():
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigurationError(f"{section}.{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class BasisSection:
    """Spectral basis and the sample count of the weak-form assembly"""

    n_v: int = 4
    n_i: int = 2
    total_degree: Optional[int] = None
    refined_n_v: int = 6
    refined_n_i: int = 3
    weak_form_samples: int = 200_000

    def __post_init__(self):
        _positive_int("basis", n_v=self.n_v, n_i=self.n_i, refined_n_v=self.refined_n_v,
                      refined_n_i=self.refined_n_i, weak_form_samples=self.weak_form_samples)
        if self.total_degree is not None:
            _positive_int("basis", total_degree=self.total_degree)


@dataclass(frozen=True)
class GridSection:
    """Sweep ranges of the bound checks and the spectrum"""

    v_max: float = 12.0
    i_max: float = 50.0
    n_speeds: int = 7
    n_energies: int = 6
    k_max: int = 2
    n_phase_points: int = 20
    q_v_max: float = 6.0
    q_i_max: float = 10.0
    kw_energies: Tuple[float, float] = (20.0, 200.0)
    kw_points: int = 5

    def __post_init__(self):
        _positive("grids", v_max=self.v_max, i_max=self.i_max, q_v_max=self.q_v_max, q_i_max=self.q_i_max)
        _positive_int("grids", n_speeds=self.n_speeds, n_energies=self.n_energies,
                      n_phase_points=self.n_phase_points, kw_points=self.kw_points)
        if isinstance(self.k_max, bool) or not isinstance(self.k_max, int) or self.k_max < 0:
            raise ConfigurationError(f"grids.k_max must be a nonnegative integer, got {self.k_max!r}")
        if self.kw_points < 2:
            raise ConfigurationError(f"grids.kw_points must be at least 2 to fit the energy decay, got {self.kw_points}")
        energies = tuple(self.kw_energies)
        if len(energies) != 2 or not 0 < energies[0] < energies[1]:
            raise ConfigurationError(f"grids.kw_energies must be an increasing pair, got {self.kw_energies!r}")
        object.__setattr__(self, "kw_energies", tuple(float(x) for x in energies))


@dataclass(frozen=True)
class Thresholds:
    """PASS thresholds of every suite"""

    n_sigma: float = 3.0
    oracle_rtol: float = 1e-3
    refinement_rtol: float = 0.10
    alpha2_spread: float = 1e-6
    kw_slope_max: float = -0.125
    symmetry_tol: float = 1e-6
    gap_drift: float = 0.05
    rate_rtol: float = 0.10
    mode_k0_fraction: float = 0.9
    conservation_tol: float = 1e-3
    boundedness_factor: float = 2.0
    contraction_max: float = 1.0
    contraction_target: float = 0.5
    transient_multiple: float = 5.0
    torus_min_efolds: float = 3.0
    equilibrium_noise_multiple: float = 10.0
    negative_mass_tol: float = 1e-3

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(f"thresholds.{item.name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class RelaxSection:
    """Homogeneous relaxation run"""

    initial: str = "bimodal"
    gamma: float = 0.55
    dt: float = 0.02
    n_steps: int = 60
    samples_per_step: int = 50_000
    stiffness_cap: float = 0.5

    def __post_init__(self):
        if self.initial not in ("bimodal", "equilibrium"):
            raise ConfigurationError(f"relax.initial must be 'bimodal' or 'equilibrium', got {self.initial!r}")
        _positive("relax", gamma=self.gamma, dt=self.dt, stiffness_cap=self.stiffness_cap)
        _positive_int("relax", n_steps=self.n_steps, samples_per_step=self.samples_per_step)


@dataclass(frozen=True)
class DecaySection:
    """Picard, mode and torus runs of the decay suite"""

    f0_norm: float = 0.01
    c1: float = 1.0
    n_iters: int = 8
    picard_n_hermite: int = 4
    picard_n_laguerre: int = 3
    picard_samples: int = 128
    mode_wavevectors: List[List[int]] = field(default_factory=lambda: [[1, 0, 0], [1, 1, 0], [1, 1, 1]])
    mode_efolds: float = 6.0
    mode_times: int = 81
    torus_cells: int = 4
    torus_n_hermite: int = 4
    torus_n_laguerre: int = 2
    torus_dt: float = 0.1
    torus_steps: int = 150
    torus_samples: int = 4096

    def __post_init__(self):
        if isinstance(self.f0_norm, bool) or not isinstance(self.f0_norm, (int, float)) or self.f0_norm < 0:
            raise ConfigurationError(f"decay.f0_norm must be a nonnegative number, got {self.f0_norm!r}")
        _positive("decay", c1=self.c1, mode_efolds=self.mode_efolds, torus_dt=self.torus_dt)
        _positive_int("decay", n_iters=self.n_iters, picard_n_hermite=self.picard_n_hermite,
                      picard_n_laguerre=self.picard_n_laguerre, picard_samples=self.picard_samples,
                      mode_times=self.mode_times, torus_cells=self.torus_cells,
                      torus_n_hermite=self.torus_n_hermite, torus_n_laguerre=self.torus_n_laguerre,
                      torus_steps=self.torus_steps, torus_samples=self.torus_samples)
        if self.torus_cells > 8:
            raise ConfigurationError(f"decay.torus_cells must be at most 8, got {self.torus_cells}")
        for k in self.mode_wavevectors:
            if len(k) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in k) or not any(k):
                raise ConfigurationError(f"decay.mode_wavevectors entries must be nonzero integer triples, got {k!r}")


@dataclass(frozen=True)
class VerifySection:
    """Which verify checks run and their sample sizes"""

    checks: List[str] = field(default_factory=lambda: list(VERIFY_CHECKS))
    gamma_trials: int = 50
    coercivity_trials: int = 1000
    kernel_point_count: int = 4

    def __post_init__(self):
        unknown = sorted(set(self.checks) - set(VERIFY_CHECKS))
        if unknown:
            raise ConfigurationError(f"verify.checks has unknown entries {unknown}; known: {list(VERIFY_CHECKS)}")
        _positive_int("verify", gamma_trials=self.gamma_trials, coercivity_trials=self.coercivity_trials,
                      kernel_point_count=self.kernel_point_count)


def _build(cls: Type[Section], raw: Any, name: str) -> Section:
    """Instantiate a section dataclass, rejecting unknown keys"""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"section '{name}' must be a mapping, got {type(raw).__name__}")
    known = {item.name for item in fields(cls) if item.init}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigurationError(f"unknown keys in '{name}': {unknown}")
    try:
        return cls(**raw)
    except DomainError as e:
        raise ConfigurationError(f"{name}: {e}") from e
    except TypeError as e:
        raise ConfigurationError(f"{name}: {e}") from e


@dataclass(frozen=True)
class RunConfig:
    """
    Resolved configuration of one suite run

    Args:
        suite: One of verify, spectrum, relax, decay
        model: Model parameters
        quad: Quadrature specification (its seed is the run seed)
        basis: Basis section
        grids: Sweep ranges
        thresholds: PASS thresholds
        relax: Relaxation run
        decay: Decay runs
        verify: Verify checks
        out_dir: Output directory
    """

    suite: str
    model: ModelParams
    quad: QuadratureSpec
    basis: BasisSection
    grids: GridSection
    thresholds: Thresholds
    relax: RelaxSection
    decay: DecaySection
    verify: VerifySection
    out_dir: Path

    @property
    def seed(self) -> int:
        return self.quad.seed

    @classmethod
    def from_dict(cls, data: Dict[str, Any], suite: Optional[str] = None, seed: Optional[int] = None,
                  out_dir: Optional[str] = None, app_config: Optional[AppConfig] = None) -> "RunConfig":
        """
        Resolve a run configuration from parsed YAML

        Args:
            data: Parsed YAML mapping
            suite: Suite selected on the command line (must agree with the file if both given)
            seed: Seed from the command line
            out_dir: Output directory from the command line
            app_config: Environment settings for the overrides

        Returns:
            RunConfig
        """
        if not isinstance(data, dict):
            raise ConfigurationError("run configuration must be a YAML mapping")
        allowed = {"suite", "seed", "out_dir", "model", "quadrature", "basis", "grids",
                   "thresholds", "relax", "decay", "verify"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigurationError(f"unknown top-level keys: {unknown}")

        file_suite = data.get("suite")
        if suite and file_suite and suite != file_suite:
            raise ConfigurationError(f"command '{suite}' does not match suite '{file_suite}' in the run file")
        resolved_suite = suite or file_suite
        if resolved_suite not in SUITES:
            raise ConfigurationError(f"suite must be one of {list(SUITES)}, got {resolved_suite!r}")

        overrides = (app_config or AppConfig()).get_override_config()
        resolved_seed = next(value for value in (seed, overrides["seed"], data.get("seed"), DEFAULT_SEED)
                             if value is not None)
        if isinstance(resolved_seed, bool) or not isinstance(resolved_seed, int) or not 0 <= resolved_seed < 2 ** 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {resolved_seed!r}")
        resolved_out = next(value for value in (out_dir, overrides["out_dir"], data.get("out_dir"), DEFAULT_OUT_DIR)
                            if value is not None)

        quad_raw = dict(data.get("quadrature") or {})
        if "seed" in quad_raw:
            raise ConfigurationError("set the seed at top level, not in 'quadrature'")
        quad_raw["seed"] = resolved_seed

        return cls(
            suite=resolved_suite,
            model=_build(ModelParams, data.get("model"), "model"),
            quad=_build(QuadratureSpec, quad_raw, "quadrature"),
            basis=_build(BasisSection, data.get("basis"), "basis"),
            grids=_build(GridSection, data.get("grids"), "grids"),
            thresholds=_build(Thresholds, data.get("thresholds"), "thresholds"),
            relax=_build(RelaxSection, data.get("relax"), "relax"),
            decay=_build(DecaySection, data.get("decay"), "decay"),
            verify=_build(VerifySection, data.get("verify"), "verify"),
            out_dir=Path(resolved_out),
        )

    @classmethod
    def from_yaml(cls, path, suite: Optional[str] = None, seed: Optional[int] = None,
                  out_dir: Optional[str] = None, app_config: Optional[AppConfig] = None) -> "RunConfig":
        """Load and resolve a YAML run file"""
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"configuration file not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"malformed YAML in {path}: {e}") from e
        config = cls.from_dict(data or {}, suite=suite, seed=seed, out_dir=out_dir, app_config=app_config)
        logger.info(f"Loaded run configuration from {path} (suite={config.suite}, seed={config.seed})")
        return config

    def with_suite(self, suite: str) -> "RunConfig":
        if suite not in SUITES:
            raise ConfigurationError(f"suite must be one of {list(SUITES)}, got {suite!r}")
        return replace(self, suite=suite)

    def to_dict(self) -> Dict[str, Any]:
        """Canonical form; out_dir is left out so the fingerprint names the computation only"""
        return {
            "suite": self.suite,
            "seed": self.seed,
            "model": self.model.to_dict(),
            "quadrature": self.quad.to_dict(),
            "basis": asdict(self.basis),
            "grids": asdict(self.grids),
            "thresholds": asdict(self.thresholds),
            "relax": asdict(self.relax),
            "decay": asdict(self.decay),
            "verify": asdict(self.verify),
        }

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
