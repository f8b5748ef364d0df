"""
Space-time error functional int_0^T ||u^h_tau(t) - u(t)||^2_{H1} dt.
"""
import numpy as np
from scipy.integrate import trapezoid

from ..fem.norms import error_norms, h1_semi, l2
from ..fem.operators import prolongation_matrix
from ..rothe.models import Trajectory
from .models import HarnessError
from .problems import ExactSolution

SUBSAMPLES = 5


def sample_times(traj: Trajectory, subsamples: int = SUBSAMPLES) -> np.ndarray:
    """Every step split into ``subsamples`` equispaced points, shared endpoints counted once."""
    if subsamples < 2:
        raise HarnessError(f"need at least 2 samples per step, got {subsamples}")
    if traj.steps == 0:
        return traj.times.copy()
    fraction = np.linspace(0.0, 1.0, subsamples)[:-1]
    inner = (traj.times[:-1, None] + fraction[None, :] * np.diff(traj.times)[:, None]).ravel()
    return np.append(inner, traj.times[-1])


def error_l2h1(traj: Trajectory, exact: ExactSolution, subsamples: int = SUBSAMPLES) -> float:
    """Squared L2(0,T; H1) error against a closed-form solution.

    Composite trapezoid in time over ``subsamples`` points per step; high-order
    element quadrature in space against the sampled exact field.
    """
    times = sample_times(traj, subsamples)
    if times.size == 1:
        return 0.0
    space = traj.space
    integrand = np.zeros(times.size)
    for i, t in enumerate(times):
        value_error, gradient_error = error_norms(
            space,
            traj.interpolate(float(t)),
            lambda points: exact.value(float(t), points),
            lambda points: exact.gradient(float(t), points),
        )
        integrand[i] = value_error + gradient_error
    return float(trapezoid(integrand, times))


def reference_error(traj: Trajectory, reference: Trajectory, subsamples: int = SUBSAMPLES) -> float:
    """Squared L2(0,T; H1) distance to a finer reference trajectory.

    The coarse field is prolongated to the reference mesh, which must refine
    the coarse one (or be the same space); both are sampled at the coarse
    trajectory's sub-sample times.

    Raises:
        HarnessError: If the horizons differ
    """
    if not np.isclose(traj.horizon, reference.horizon):
        raise HarnessError(f"horizons differ: {traj.horizon} vs {reference.horizon}")
    fine = reference.space
    transfer = None if traj.space is fine else prolongation_matrix(traj.space, fine)
    times = sample_times(traj, subsamples)
    if times.size == 1:
        return 0.0
    integrand = np.zeros(times.size)
    for i, t in enumerate(times):
        coarse = traj.interpolate(float(t))
        difference = (coarse if transfer is None else transfer @ coarse) - reference.interpolate(float(t))
        integrand[i] = l2(fine, difference) ** 2 + h1_semi(fine, difference) ** 2
    return float(trapezoid(integrand, times))
