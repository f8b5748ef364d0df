"""
Zero-dimensional double-well example: closed-form solution branches, the
global (energetic) and branch-restricted (strong) incremental steppers,
stability tests and the energy balance.

The energy is E(t, z) = W0(z) - f(t) z with W0(z) = z^2 - 2|z| = min{z(z+2), z(z-2)},
the dissipation is R1 = |.| and the force is f(t) = t.
"""
from typing import Optional, Tuple, Union

import numpy as np

from ..logger import get_logger
from ..models import SolutionMode
from .models import BranchExit, OutOfDomain, ScalarTrajectory, ZeroDimError

logger = get_logger(__name__)

TIE_TOLERANCE = 1e-12
STABILITY_TOLERANCE = 1e-12


def well_energy(z: float) -> float:
    return z * z - 2.0 * abs(z)


def well_gradient(z: float) -> float:
    return 2.0 * z - 2.0 * float(np.sign(z))


def total_energy(t: float, z: float, force_rate: float = 1.0) -> float:
    return well_energy(z) - force_rate * t * z


def exact_solution(mode: Union[SolutionMode, str], t: float) -> float:
    """Closed-form weak, strong and extended solutions starting from u(0) = -1.

    Args:
        mode: weak, strong or extended
        t: Time, t >= 0

    Returns:
        u(t) on the requested branch

    Raises:
        OutOfDomain: For the strong solution at t >= 3, where it ceases to exist
    """
    mode = SolutionMode(mode)
    if t < 0:
        raise OutOfDomain(f"t must be nonnegative, got {t}")
    if t < 1.0:
        return -1.0
    if mode == SolutionMode.WEAK:
        return (t + 1.0) / 2.0
    if mode == SolutionMode.STRONG:
        if t >= 3.0:
            raise OutOfDomain(f"the strong solution exists on [0, 3) only, got t={t}")
        return (t - 3.0) / 2.0
    if mode == SolutionMode.EXTENDED:
        return (t - 3.0) / 2.0 if t < 3.0 else (t + 1.0) / 2.0
    raise ZeroDimError(f"no closed form for mode '{mode}'")


def _branch_minimizer(u_prev: float, t: float, branch: int, force_rate: float = 1.0) -> float:
    """Unconstrained minimizer of |z - u_prev| + z^2 - (2 branch + f) z.

    On the branch {branch * z >= 0} this is the increment with W0 replaced by
    its convex piece z^2 - 2 branch z; the solution is a soft-threshold step.
    """
    c = 2.0 * branch + force_rate * t
    a = c / 2.0 - u_prev
    return u_prev + float(np.sign(a)) * max(abs(a) - 0.5, 0.0)


def _increment_objective(z: float, u_prev: float, t: float, force_rate: float = 1.0) -> float:
    return abs(z - u_prev) + well_energy(z) - force_rate * t * z


def _global_minimizer(u_prev: float, t: float, force_rate: float = 1.0) -> Tuple[float, float]:
    candidates = [u_prev, 0.0]
    for branch in (1, -1):
        z = _branch_minimizer(u_prev, t, branch, force_rate)
        candidates.append(max(z, 0.0) if branch > 0 else min(z, 0.0))

    values = [_increment_objective(z, u_prev, t, force_rate) for z in candidates]
    best = min(values)
    tolerance = TIE_TOLERANCE * (1.0 + abs(best))
    # ties go to the candidate closest to u_prev
    tied = [z for z, v in zip(candidates, values) if v <= best + tolerance]
    choice = min(tied, key=lambda z: abs(z - u_prev))
    return choice, _increment_objective(choice, u_prev, t, force_rate)


def step_global(u_prev: float, t_k: float, tau: float) -> float:
    """Global minimizer of the incremental functional at time t_k.

    Rate independence makes the result independent of tau, which is only
    validated.
    """
    if not tau > 0:
        raise ZeroDimError(f"tau must be positive, got {tau}")
    return _global_minimizer(u_prev, t_k)[0]


def step_local(u_prev: float, t_k: float, tau: float, branch: Optional[int] = None) -> float:
    """Minimizer of the incremental functional restricted to the current convex branch.

    Args:
        u_prev: Previous value
        t_k: Step time
        tau: Step size (validated only)
        branch: Branch sign to use when u_prev == 0, normally the previous step's branch

    Returns:
        The branch-restricted minimizer

    Raises:
        BranchExit: If the minimizer reaches the convexity boundary z = 0
        ZeroDimError: If u_prev == 0 and no branch is given
    """
    if not tau > 0:
        raise ZeroDimError(f"tau must be positive, got {tau}")
    if u_prev != 0.0:
        branch = 1 if u_prev > 0 else -1
    elif branch not in (1, -1):
        raise ZeroDimError("u_prev sits on the convexity boundary; pass the previous branch")

    z = _branch_minimizer(u_prev, t_k, branch)
    if branch * z <= 0.0:
        if u_prev == 0.0 and z == 0.0:
            return 0.0
        raise BranchExit(time=t_k, last_value=u_prev)
    return z


def stability_check(t: float, u: float, kind: Union[SolutionMode, str]) -> bool:
    """Local (subdifferential) or global (energetic) stability of u at time t."""
    kind = SolutionMode(kind)
    if kind == SolutionMode.LOCAL:
        return abs(t - well_gradient(u)) <= 1.0 + STABILITY_TOLERANCE
    if kind == SolutionMode.GLOBAL:
        _, best = _global_minimizer(u, t)
        return total_energy(t, u) <= best + STABILITY_TOLERANCE * (1.0 + abs(best))
    raise ZeroDimError(f"stability kind must be global or local, got '{kind}'")


def _time_grid(tau: float, horizon: float) -> np.ndarray:
    if not tau > 0 or not horizon > 0:
        raise ZeroDimError(f"tau and T must be positive, got tau={tau}, T={horizon}")
    steps = int(round(horizon / tau))
    return tau * np.arange(steps + 1)


def simulate(mode: Union[SolutionMode, str], tau: float, horizon: float, initial: float = -1.0) -> ScalarTrajectory:
    """Run a stepper, or sample a closed-form branch, on the grid t_k = k tau.

    The local stepper stops at its first BranchExit; the trajectory is then
    truncated and records the exit time. The strong branch is sampled on
    [0, 3) only.
    """
    mode = SolutionMode(mode)
    times = _time_grid(tau, horizon)

    if mode in (SolutionMode.WEAK, SolutionMode.STRONG, SolutionMode.EXTENDED):
        if mode == SolutionMode.STRONG:
            times = times[times < 3.0]
        values = np.array([exact_solution(mode, t) for t in times])
        return ScalarTrajectory(times=times, values=values, mode=mode)

    values = [initial]
    branch = -1 if initial <= 0 else 1
    exit_time = None
    for t in times[1:]:
        u_prev = values[-1]
        if mode == SolutionMode.GLOBAL:
            values.append(step_global(u_prev, t, tau))
            continue
        try:
            u = step_local(u_prev, t, tau, branch=branch)
        except BranchExit as e:
            logger.warning(f"Local stepper stopped: {e}")
            exit_time = e.time
            break
        if u != 0.0:
            branch = 1 if u > 0 else -1
        values.append(u)

    return ScalarTrajectory(
        times=times[:len(values)],
        values=np.array(values),
        mode=mode,
        exit_time=exit_time,
    )


def _abs_affine_integral(left: np.ndarray, right: np.ndarray, width: np.ndarray) -> np.ndarray:
    """Exact integral of |g| over intervals where g is affine with the given end values."""
    same_sign = left * right >= 0.0
    total = np.abs(left) + np.abs(right)
    crossing = np.divide(left * left + right * right, total, out=np.zeros_like(total), where=total > 0)
    return width * np.where(same_sign, 0.5 * total, 0.5 * crossing)


def time_error_l1(traj: ScalarTrajectory, target: Union[SolutionMode, str]) -> float:
    """L1(0, t_N) distance between the piecewise-affine interpolant and a closed form.

    The grid is refined by the kinks of the closed forms (t = 1 and t = 3) so
    that the difference is affine on every piece and is integrated exactly.
    A grid that straddles the kink sees the error of the interpolant between
    grid points, which sampling at the grid times alone cannot.
    """
    target = SolutionMode(target)
    if len(traj) < 2:
        return 0.0
    times = traj.times
    kinks = [k for k in (1.0, 3.0) if times[0] < k < times[-1]]
    nodes = np.union1d(times, kinks)
    left, right, middle = nodes[:-1], nodes[1:], 0.5 * (nodes[:-1] + nodes[1:])

    exact_left = np.array([exact_solution(target, t) for t in left])
    exact_middle = np.array([exact_solution(target, t) for t in middle])
    # closed forms are right-continuous, so the value at a piece's right end comes from the left
    exact_right = 2.0 * exact_middle - exact_left

    diff_left = np.interp(left, times, traj.values) - exact_left
    diff_right = np.interp(right, times, traj.values) - exact_right
    return float(np.sum(_abs_affine_integral(diff_left, diff_right, right - left)))


def energy_balance_defects(traj: ScalarTrajectory) -> np.ndarray:
    """Per-sample defect of E(t) - E(0) + int_0^t f' u ds + Var(u; [0, t)).

    The work integral uses the trapezoid rule and jumps are dissipated as
    R1 of the discrete jump between consecutive samples.
    """
    t, u, rate = traj.times, traj.values, traj.force_rate
    energy = u * u - 2.0 * np.abs(u) - rate * t * u
    work = np.concatenate([[0.0], np.cumsum(0.5 * rate * (u[1:] + u[:-1]) * np.diff(t))])
    variation = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(u)))])
    return energy - energy[0] + work + variation


def energy_balance_residual(traj: ScalarTrajectory) -> float:
    """Sup over the grid of the (sign-corrected) energy balance defect."""
    if len(traj) == 0:
        return 0.0
    return float(np.max(np.abs(energy_balance_defects(traj))))


def scalar_pde_reference(x: Union[float, np.ndarray], t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact solution u = max(t-1, 0) phi(x) of the 1-D model problem and its x-derivative.

    phi solves -phi'' + phi = 1 on (0, 1) with phi(0) = phi(1) = 0, i.e.
    phi(x) = 1 - cosh(x - 1/2) / cosh(1/2).
    """
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ZeroDimError("x must lie in [0, 1]")
    amplitude = max(t - 1.0, 0.0)
    value = amplitude * (1.0 - np.cosh(x - 0.5) / np.cosh(0.5))
    gradient = -amplitude * np.sinh(x - 0.5) / np.cosh(0.5)
    return value, gradient
