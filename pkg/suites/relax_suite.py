"""
Relax Suite

Space-homogeneous relaxation from bimodal (or equilibrium) initial data:
conservation of the defect moments, entropy decay and the distance to the
moment-matched Maxwellian.
"""

import numpy as np

from config.run_config import RunConfig
from solver.relaxation import HomogeneousRelaxation, bimodal_initial_grid, equilibrium_initial_state
from utils.report_writer import ReportWriter

from .base_suite import BaseSuite, CheckResult


class RelaxSuite(BaseSuite):
    """Conservation and H-theorem along homogeneous relaxation"""

    name = "relax"

    def run_checks(self) -> None:
        self.check("relaxation", self.check_relaxation)

    def initial_grid(self):
        section = self.config.relax
        if section.initial == "equilibrium":
            return equilibrium_initial_state(self.params, self.quad)
        return bimodal_initial_grid(self.params, self.quad, section.gamma)

    def check_relaxation(self) -> CheckResult:
        section = self.config.relax
        solver = HomogeneousRelaxation(self.params, self.quad, self.basis, n_samples=section.samples_per_step,
                                       negative_mass_tol=self.thresholds.negative_mass_tol)
        self.logger.info(f"relaxing {section.initial} data: dt={section.dt}, steps={section.n_steps}, "
                         f"dt*nu_max={section.dt * solver.nu_max:.3g}")
        trajectory = solver.run(self.initial_grid(), section.dt, section.n_steps, section.stiffness_cap)

        frame = trajectory.to_frame()
        self.writer.write_csv("trajectory.csv", frame)
        self.writer.write_series("entropy_vs_t", frame["t"], frame["entropy"])
        self.writer.write_series("l2_distance_vs_t", frame["t"], frame["l2_distance"])

        mass = 1.0 + float(frame["mass_defect"].iloc[0])
        drift = trajectory.conservation_drift()
        worst_drift = max(drift.values())
        conservation_tol = self.thresholds.conservation_tol * mass
        violations = trajectory.entropy_violations()
        noise = self.thresholds.equilibrium_noise_multiple * np.finfo(float).eps
        initial_distance = float(frame["l2_distance"].iloc[0])
        final_distance = float(frame["l2_distance"].iloc[-1])
        approaches = final_distance <= initial_distance + noise

        if violations:
            self.logger.warning(f"entropy increased beyond tolerance at steps {violations}")
        passed = worst_drift <= conservation_tol and not violations and approaches
        return CheckResult("relaxation", passed, worst_drift, conservation_tol, {
            "initial": section.initial,
            "drift": drift,
            "entropy_violations": violations,
            "max_entropy_tolerance": max(trajectory.tolerances, default=0.0),
            "max_negative_mass": max(trajectory.negative_masses, default=0.0),
            "initial_l2_distance": initial_distance,
            "final_l2_distance": final_distance,
            "nu_max": trajectory.nu_max,
            "dt_nu_max": section.dt * trajectory.nu_max,
            "samples_per_step": trajectory.samples_per_step,
        })


def cmd_relax(config: RunConfig, writer: ReportWriter) -> int:
    """
    Run the relax suite

    Returns:
        int: 0 on PASS, 1 on a failed check or a stiffness diagnostic
    """
    return RelaxSuite(config.with_suite("relax"), writer).run()
