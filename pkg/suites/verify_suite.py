"""
Verify Suite

Measures the constants of the pointwise bounds and of the linearized
operator: collision frequency equivalence, weighted kernel decay, the
nonlinear term bound, symmetry, kernel and coercivity of L, the Galerkin
norm of K, collision invariants and the brute-force kernel oracles.
"""

import math
from dataclasses import replace
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from collision.distributions import MaxwellianDistribution, MaxwellianProductDistribution
from collision.operator import collision_invariant_residuals, gamma_apply, sweep_q
from collision.sampling import stream
from config.run_config import RunConfig
from gas_model.equilibrium import weight_values
from gas_model.params import PhasePoint
from gas_model.quadrature import QuadratureSpec
from kernels.frequency import nu, nu_bound_ratios, nu_monte_carlo, nu_values
from kernels.kernels import KernelPoint, k1, k1_monte_carlo, k2, k2_monte_carlo, kw_weighted_integral
from linearized.basis import KERNEL_DIMENSION, build_basis
from linearized.operator import (
    assemble_L,
    assemble_nu_matrix,
    coercivity_gap,
    cross_validate_entries,
    k_operator_norm,
    kernel_dimension,
)
from solver.relaxation import bimodal_initial_state
from utils.report_writer import ReportWriter

from .base_suite import BaseSuite, CheckResult

GAMMA_TRIAL_STREAM = 71
COERCIVITY_STREAM = 72
ORACLE_STREAM = 73

KW_EPS = 1 / 64
KW_M = 1 / 8
GAMMA_POINTS = (((0.0, 0.0, 0.0), 1.0), ((2.0, 0.0, 0.0), 0.5), ((0.0, 3.0, 1.0), 3.0), ((4.0, -2.0, 1.0), 6.0))
SWEEP_DIRECTION = np.array([1.0, 2.0, 2.0]) / 3.0


def _outer_refined(quad: QuadratureSpec) -> QuadratureSpec:
    return replace(quad, n_outer_radial=2 * quad.n_outer_radial, n_outer_energy=2 * quad.n_outer_energy)


def energy_decay_fit(energies, values) -> Tuple[float, float]:
    """
    Least-squares log-log slope of values against energies

    Returns:
        (slope, standard error of the slope); the error is 0 for two points
    """
    fit = stats.linregress(np.log(np.asarray(energies, dtype=float)), np.log(np.asarray(values, dtype=float)))
    stderr = float(fit.stderr) if np.isfinite(fit.stderr) else 0.0
    return float(fit.slope), stderr


def energy_decay_passes(slope: float, stderr: float, slope_max: float, n_sigma: float) -> bool:
    """slope ≤ slope_max, widened by n_sigma standard errors of the fit"""
    return math.isfinite(slope) and slope <= slope_max + n_sigma * stderr


class VerifySuite(BaseSuite):
    """Bound constants and operator properties"""

    name = "verify"

    def run_checks(self) -> None:
        checks = {
            "lemma_2_1": self.check_frequency_bounds,
            "lemma_2_2": self.check_weighted_kernel,
            "lemma_2_3": self.check_nonlinear_bound,
            "prop_4_1": self.check_operator_structure,
            "prop_4_2": self.check_coercivity,
            "lemma_4_3": self.check_k_norm,
            "collision_invariants": self.check_collision_invariants,
            "kernel_oracles": self.check_kernel_oracles,
        }
        for name in self.config.verify.checks:
            self.check(name, checks[name])

    # shared operators

    @cached_property
    def refined_basis(self):
        section = self.config.basis
        return build_basis(section.refined_n_v, section.refined_n_i, self.params)

    @cached_property
    def refined_L(self):
        return assemble_L(self.refined_basis, self.weak_form_quad)

    # checks

    def check_frequency_bounds(self) -> CheckResult:
        grids = self.config.grids
        speeds = np.linspace(0.0, grids.v_max, grids.n_speeds)
        energies = np.linspace(0.0, grids.i_max, grids.n_energies)
        s, e = np.meshgrid(speeds, energies, indexing="ij")
        v = s.reshape(-1, 1) * SWEEP_DIRECTION
        i = e.reshape(-1)
        refined = replace(self.quad.refined(), n_laguerre=2 * self.quad.n_laguerre)
        ratios = nu_bound_ratios(v, i, self.params, self.quad)
        ratios_refined = nu_bound_ratios(v, i, self.params, refined)
        change = float(np.max(np.abs(ratios_refined - ratios) / ratios))
        frame = pd.DataFrame({"speed": s.reshape(-1), "i": i, "nu_ratio": ratios, "nu_ratio_refined": ratios_refined})
        self.writer.write_csv("lemma_2_1.csv", frame)
        self.writer.write_series("lemma_2_1_ratio_vs_speed", s[:, 0], ratios.reshape(s.shape)[:, 0])

        details = {"sup": float(ratios.max()), "inf": float(ratios.min()), "refinement_change": change}
        passed = bool(np.all(np.isfinite(ratios)) and ratios.min() > 0 and change < self.thresholds.refinement_rtol)
        if self.params.alpha == 2:
            frequency = nu_values(v, i, self.params, self.quad)
            spread = float((frequency.max() - frequency.min()) / frequency.mean())
            details["alpha2_spread"] = spread
            passed = passed and spread < self.thresholds.alpha2_spread
        return CheckResult("lemma_2_1", passed, float(ratios.max()), self.thresholds.refinement_rtol, details)

    def check_weighted_kernel(self) -> CheckResult:
        grids = self.config.grids
        points: List[PhasePoint] = [PhasePoint(v=tuple(s * SWEEP_DIRECTION), i=1.0)
                                    for s in np.linspace(0.0, grids.v_max / 2, grids.kw_points)]
        decade = np.geomspace(grids.kw_energies[0], grids.kw_energies[1], grids.kw_points)
        points += [PhasePoint(v=(0.0, 0.0, 0.0), i=float(x)) for x in decade]
        refined = _outer_refined(self.quad)

        rows = []
        for p in points:
            value = kw_weighted_integral(p, KW_EPS, KW_M, self.params, self.quad)
            value_refined = kw_weighted_integral(p, KW_EPS, KW_M, self.params, refined)
            scale = 1 + p.speed + p.i ** 0.125
            rows.append({"speed": p.speed, "i": p.i, "kw_integral": value, "kw_integral_refined": value_refined,
                         "scaled": scale * value, "scaled_refined": scale * value_refined})
        frame = pd.DataFrame(rows)
        self.writer.write_csv("lemma_2_2.csv", frame)

        tail = frame.iloc[grids.kw_points:]
        slope, slope_error = energy_decay_fit(tail["i"], tail["kw_integral"])
        self.writer.write_series("lemma_2_2_energy_decay", tail["i"], tail["kw_integral"])
        change = float(np.max(np.abs(frame["scaled_refined"] - frame["scaled"]) / frame["scaled"]))
        bound = float(frame["scaled"].max())
        decays = energy_decay_passes(slope, slope_error, self.thresholds.kw_slope_max, self.thresholds.n_sigma)
        passed = math.isfinite(bound) and change < self.thresholds.refinement_rtol and decays
        return CheckResult("lemma_2_2", passed, bound, self.thresholds.refinement_rtol,
                           {"energy_slope": slope, "energy_slope_stderr": slope_error,
                            "energy_slope_max": self.thresholds.kw_slope_max, "refinement_change": change, "eps": KW_EPS, "m": KW_M})

    def _trial_function(self, trial: int):
        rng = stream(self.quad.seed, GAMMA_TRIAL_STREAM, trial)
        amplitude = rng.uniform(-1.0, 1.0, 3)
        frequency = rng.normal(0.0, 0.5, (3, 3))
        energy_frequency = rng.normal(0.0, 0.3, 3)
        phase = rng.uniform(0.0, 2 * math.pi, 3)
        beta = self.params.beta

        def h(v, i):
            v = np.atleast_2d(v)
            i = np.atleast_1d(i)
            return np.sum(amplitude * np.cos(v @ frequency.T + i[:, None] * energy_frequency + phase), axis=1)

        def f(v, i):
            return h(v, i) / weight_values(np.atleast_2d(v), np.atleast_1d(i), beta)

        cloud_rng = stream(self.quad.seed, GAMMA_TRIAL_STREAM, trial, 1)
        grids = self.config.grids
        cloud_v = cloud_rng.uniform(-grids.v_max, grids.v_max, (4096, 3))
        cloud_i = cloud_rng.uniform(0.0, grids.i_max, 4096)
        return f, float(np.max(np.abs(h(cloud_v, cloud_i))))

    def check_nonlinear_bound(self) -> CheckResult:
        trials = self.config.verify.gamma_trials
        points = [PhasePoint(v=v, i=i) for v, i in GAMMA_POINTS]
        frequencies = [nu(p, self.params, self.quad) for p in points]
        weights = [float(weight_values(p.velocity, np.asarray(p.i), self.params.beta)) for p in points]
        refined = replace(self.quad, mc_samples=2 * self.quad.mc_samples)

        rows = []
        for trial in range(trials):
            f, norm = self._trial_function(trial)
            for j, p in enumerate(points):
                index = trial * len(points) + j
                scale = frequencies[j] * norm ** 2
                base = gamma_apply(f, f, p, self.params, self.quad, stream_index=index)
                fine = gamma_apply(f, f, p, self.params, refined, stream_index=index)
                rows.append({"trial": trial, "point": j, "ratio": abs(weights[j] * base.value) / scale,
                             "ratio_refined": abs(weights[j] * fine.value) / scale,
                             "std_error": weights[j] * base.std_error / scale})
        frame = pd.DataFrame(rows)
        self.writer.write_csv("lemma_2_3.csv", frame)
        sup = float(frame["ratio"].max())
        sup_refined = float(frame["ratio_refined"].max())
        change = abs(sup_refined - sup) / sup if sup > 0 else 0.0
        passed = math.isfinite(sup) and change < self.thresholds.refinement_rtol
        return CheckResult("lemma_2_3", passed, sup, self.thresholds.refinement_rtol,
                           {"sup_refined": sup_refined, "refinement_change": change, "trials": trials})

    def check_operator_structure(self) -> CheckResult:
        L = self.L
        values = L.eigenvalues()
        scale = float(np.max(np.abs(values)))
        asymmetry = L.asymmetry()
        dimension = kernel_dimension(L)
        self.writer.write_csv("prop_4_1.csv", pd.DataFrame({"index": np.arange(len(values)), "eigenvalue": values}))

        size = self.basis.size
        entries = [(KERNEL_DIMENSION, KERNEL_DIMENSION), (KERNEL_DIMENSION, size - 1), (size - 1, size - 1)]
        report = cross_validate_entries(self.basis, L, self.quad, entries, weak_form_quad=self.weak_form_quad,
                                        n_sigma=self.thresholds.n_sigma, rtol=self.thresholds.oracle_rtol)
        self.writer.write_records("prop_4_1_cross_validation.csv", report)
        disagreeing = [(row["i"], row["j"]) for row in report if not row["agrees"]]

        passed = (asymmetry < self.thresholds.symmetry_tol and values[0] >= -self.thresholds.symmetry_tol * scale
                  and dimension == KERNEL_DIMENSION and not disagreeing)
        return CheckResult("prop_4_1", passed, asymmetry, self.thresholds.symmetry_tol,
                           {"kernel_dimension": dimension, "min_eigenvalue": float(values[0]),
                            "max_eigenvalue": float(values[-1]), "basis_size": size,
                            "nu_minus_k_disagreeing": disagreeing})

    def check_coercivity(self) -> CheckResult:
        gap = coercivity_gap(self.L)
        gap_refined = coercivity_gap(self.refined_L)
        drift = abs(gap_refined - gap) / gap

        rng = stream(self.quad.seed, COERCIVITY_STREAM)
        samples = rng.standard_normal((self.config.verify.coercivity_trials, self.basis.size))
        kernel = self.basis.kernel_basis()
        micro = samples - (samples @ kernel.T) @ kernel
        dissipation = np.einsum("ti,ij,tj->t", samples, self.L.entries, samples)
        bound = gap * np.sum(micro * micro, axis=1)
        ratio = dissipation / bound
        self.writer.write_csv("prop_4_2.csv", pd.DataFrame({"trial": np.arange(len(ratio)), "ratio": ratio}))

        min_ratio = float(ratio.min())
        passed = drift < self.thresholds.gap_drift and min_ratio >= 1 - 1e-9
        return CheckResult("prop_4_2", passed, gap, self.thresholds.gap_drift,
                           {"lambda0_refined": gap_refined, "drift": drift, "min_coercivity_ratio": min_ratio})

    def check_k_norm(self) -> CheckResult:
        norm = k_operator_norm(self.L, assemble_nu_matrix(self.basis, self.quad))
        norm_refined = k_operator_norm(self.refined_L, assemble_nu_matrix(self.refined_basis, self.quad))
        change = abs(norm_refined - norm) / norm
        passed = math.isfinite(norm) and change < self.thresholds.refinement_rtol
        return CheckResult("lemma_4_3", passed, norm, self.thresholds.refinement_rtol,
                           {"norm_refined": norm_refined, "refinement_change": change})

    def check_collision_invariants(self) -> CheckResult:
        grids = self.config.grids
        n = grids.n_phase_points
        rng = stream(self.quad.seed, ORACLE_STREAM, 0)
        directions = rng.standard_normal((n, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        speeds = np.linspace(0.0, grids.q_v_max, n)
        energies = np.linspace(0.05, grids.q_i_max, n)
        points = [PhasePoint(v=tuple(s * d), i=float(e)) for s, d, e in zip(speeds, directions, energies)]
        M = MaxwellianDistribution(self.params)
        estimates = sweep_q(M, M, points, self.params, self.quad)
        rows = [{"speed": p.speed, "i": p.i, **est.to_dict(), "tolerance": est.tolerance(self.thresholds.n_sigma)}
                for p, est in zip(points, estimates)]
        equilibrium_ok = all(abs(est.value) <= est.tolerance(self.thresholds.n_sigma) for est in estimates)
        self.writer.write_records("collision_equilibrium.csv", rows)

        small = replace(self.quad, mc_samples=min(self.quad.mc_samples, 20_000))
        F = MaxwellianProductDistribution(self.params, bimodal_initial_state(self.params))
        residuals = collision_invariant_residuals(F, self.params, small, n_hermite=4, n_laguerre=4)
        rows = []
        conservation_ok = True
        worst = 0.0
        for name, (value, error) in residuals.items():
            tolerance = self.thresholds.n_sigma * error + self.thresholds.oracle_rtol
            conservation_ok = conservation_ok and abs(value) <= tolerance
            worst = max(worst, abs(value))
            rows.append({"invariant": name, "value": value, "std_error": error, "tolerance": tolerance})
        self.writer.write_records("collision_invariants.csv", rows)
        return CheckResult("collision_invariants", equilibrium_ok and conservation_ok, worst, self.thresholds.n_sigma,
                           {"equilibrium_points": n, "equilibrium_ok": equilibrium_ok,
                            "conservation_ok": conservation_ok})

    def check_kernel_oracles(self) -> CheckResult:
        rng = stream(self.quad.seed, ORACLE_STREAM, 1)
        count = self.config.verify.kernel_point_count
        rows: List[Dict] = []
        passed = True
        worst = 0.0
        for index in range(count):
            v, v_star = rng.standard_normal((2, 3))
            i, i_star = rng.gamma(self.params.delta / 2, 1.0, 2) + 0.1
            kp = KernelPoint(p=PhasePoint(v=tuple(v), i=float(i)), p_star=PhasePoint(v=tuple(v_star), i=float(i_star)))
            pairs = {
                "nu": (nu(kp.p, self.params, self.quad), nu_monte_carlo(kp.p, self.params, self.quad, index)),
                "k1": (k1(kp, self.params, self.quad), k1_monte_carlo(kp, self.params, self.quad, index)),
                "k2": (k2(kp, self.params, self.quad), k2_monte_carlo(kp, self.params, self.quad, index)),
            }
            for name, (reference, estimate) in pairs.items():
                tolerance = self.thresholds.n_sigma * estimate.std_error + self.thresholds.oracle_rtol * abs(reference)
                error = abs(estimate.value - reference)
                ok = error <= tolerance
                passed = passed and ok
                worst = max(worst, error / tolerance if tolerance > 0 else 0.0)
                rows.append({"point": index, "quantity": name, "quadrature": reference, **estimate.to_dict(),
                             "tolerance": tolerance, "agrees": ok})
        self.writer.write_records("kernel_oracles.csv", rows)
        return CheckResult("kernel_oracles", passed, worst, 1.0, {"points": count})


def cmd_verify(config: RunConfig, writer: ReportWriter) -> int:
    """
    Run the verify suite

    Returns:
        int: 0 when every check passes, 1 otherwise
    """
    return VerifySuite(config.with_suite("verify"), writer).run()
