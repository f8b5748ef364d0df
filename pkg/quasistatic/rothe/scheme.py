"""
Rothe time loop: uniform partition, projected initial datum, one incremental
minimization per step.
"""
import time
import warnings
from typing import Callable, Optional

import numpy as np

from ..fem.norms import h1_semi, l2
from ..fem.operators import elliptic_project_initial
from ..fem.space import FemSpace
from ..increment.models import NoConvergence, StepOptions
from ..increment.solver import minimize_increment
from ..logger import get_logger
from ..mesh.poincare import gating_poincare_constant
from ..model.admissibility import check_admissibility
from ..model.data import ProblemSpec
from ..model.models import AdmissibilityReport
from .models import InitialInstability, InitialStability, RotheError, Trajectory

logger = get_logger(__name__)

STABILITY_FACTOR = 100.0

WarmStart = Callable[[int, np.ndarray], np.ndarray]


class RotheScheme:
    """Incremental minimization on a fixed space.

    Args:
        spec: Problem definition; when its Poincare constant is missing the
            larger of the consistent and lumped constants of the space is used
        space: FEM space
        options: Step options shared by every increment
        enforce_admissibility: Reject problems violating mu C_P^2 < kappa
    """

    def __init__(
        self,
        spec: ProblemSpec,
        space: FemSpace,
        options: Optional[StepOptions] = None,
        enforce_admissibility: bool = True,
    ):
        if spec.components != space.components or spec.dimension != space.dimension:
            raise RotheError("problem and space disagree in dimension or components")
        if spec.poincare_constant is None:
            spec = spec.with_poincare_constant(gating_poincare_constant(space))
        self.spec = spec
        self.space = space
        self.options = options or StepOptions()
        self.enforce_admissibility = enforce_admissibility
        self._initial = None
        self._report: Optional[AdmissibilityReport] = None

    @property
    def initial_field(self) -> np.ndarray:
        """Coefficients of u^h_0 = Pi^h_0 u0."""
        if self._initial is None:
            self._initial = elliptic_project_initial(self.space, self.spec.initial, self.spec.tensor).values
        return self._initial

    @property
    def stability_tolerance(self) -> float:
        return STABILITY_FACTOR * self.options.tol

    def admissibility(self) -> AdmissibilityReport:
        if self._report is None:
            self._report = check_admissibility(self.spec)
        return self._report

    def check_initial_stability(self) -> InitialStability:
        """Solve the t = 0 increment from u^h_0 and measure how far it moves in H1."""
        u0 = self.initial_field
        moved, certificate = minimize_increment(self.space, self.space.field(u0, time=0.0), 0.0, self.spec, self.options)
        difference = moved.values - u0
        margin = float(np.hypot(l2(self.space, difference), h1_semi(self.space, difference)))
        tolerance = self.stability_tolerance
        return InitialStability(stable=margin <= tolerance, margin=margin, tolerance=tolerance, certificate=certificate)

    def run(self, steps: int, warm_start: Optional[WarmStart] = None) -> Trajectory:
        """Run N uniform steps on [0, T].

        Args:
            steps: Number of steps N >= 1
            warm_start: Optional map (k, u_{k-1}) -> initial guess of step k

        Returns:
            The trajectory with one certificate per step

        Raises:
            InadmissibleProblem: If admissibility is enforced and fails
            NoConvergence: Carrying the index of the failing step
            RotheError: If a step increased the incremental objective
        """
        if steps < 1:
            raise RotheError(f"a run needs N >= 1 steps, got {steps}")
        if self.enforce_admissibility:
            self.admissibility().raise_for_status()

        space, spec = self.space, self.spec
        times = spec.horizon * np.arange(steps + 1) / steps
        values = np.zeros((steps + 1, space.num_dofs))
        values[0] = self.initial_field

        initial = self.check_initial_stability()
        if not initial.stable:
            message = (f"initial datum is not incrementally stable: the t=0 step moves it by "
                       f"{initial.margin:.3e} > {initial.tolerance:.1e} in H1")
            logger.warning(message)
            warnings.warn(message, InitialInstability)

        logger.info(f"Rothe run '{spec.name}': N={steps}, tau={spec.horizon / steps:.4g}, {space!r}")
        certificates, timings = [], []
        report_every = max(1, steps // 10)
        for k in range(1, steps + 1):
            started = time.perf_counter()
            previous = space.field(values[k - 1], time=float(times[k - 1]))
            guess = warm_start(k, values[k - 1]) if warm_start is not None else None
            try:
                u_k, certificate = minimize_increment(space, previous, float(times[k]), spec, self.options, guess)
            except NoConvergence as e:
                logger.error(f"Step {k} (t={times[k]:.6g}) failed: {e}")
                raise e.at_step(k) from e

            if not certificate.decreased:
                logger.error(f"Step {k} increased the incremental objective by {certificate.objective_change:.3e}")
                raise RotheError(f"step {k}: objective increased by {certificate.objective_change:.3e}")
            if certificate.el_violation > self.options.el_tolerance:
                logger.warning(f"Step {k}: Euler-Lagrange violation {certificate.el_violation:.3e}")

            values[k] = u_k.values
            certificates.append(certificate)
            timings.append(time.perf_counter() - started)
            if k % report_every == 0 or k == steps:
                logger.info(f"Step {k}/{steps} t={times[k]:.4g}: {certificate.iterations} iterations")

        trajectory = Trajectory(
            space=space,
            times=times,
            values=values,
            certificates=certificates,
            initial_margin=initial.margin,
            timings=timings,
            options=self.options,
        )
        failed = trajectory.failed_steps
        if failed:
            logger.warning(f"{len(failed)} of {steps} step certificates failed, first at step {failed[0]}")
        return trajectory


def run(spec: ProblemSpec, space: FemSpace, N: int, opts: Optional[StepOptions] = None,
        enforce_admissibility: bool = True) -> Trajectory:
    """Convenience wrapper around RotheScheme.run."""
    return RotheScheme(spec, space, opts, enforce_admissibility=enforce_admissibility).run(N)
