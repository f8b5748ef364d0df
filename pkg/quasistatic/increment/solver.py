"""
Forward-backward splitting for one incremental step.

The smooth part g takes an explicit gradient step; the lumped dissipation is
separable over nodes, so its prox is applied node by node around u_prev.
Momentum with function-value restart keeps the accepted objective values
monotone.
"""
import time
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ..fem.models import NodalField
from ..fem.space import FemSpace
from ..logger import get_logger
from ..model.data import ProblemSpec
from .functional import IncrementProblem, build_increment
from .models import CurvatureBoxExit, IncrementError, NoConvergence, NonConvexTotal, StepCertificate, StepOptions

logger = get_logger(__name__)

POWER_STEPS = 50
POWER_MARGIN = 1.05
ROUNDING = 1e-13


def gershgorin_bound(matrix: sparse.spmatrix) -> float:
    """max_i sum_j |K_ij|, an upper bound on the spectral radius."""
    return float(np.max(np.asarray(abs(matrix).sum(axis=1)).ravel(), initial=0.0))


def largest_eigenvalue(matrix: sparse.spmatrix, steps: int = POWER_STEPS) -> float:
    """Power-iteration estimate of lambda_max, inflated by a margin and capped by Gershgorin."""
    n = matrix.shape[0]
    bound = gershgorin_bound(matrix)
    if bound == 0.0:
        return 0.0
    x = np.random.default_rng(0).standard_normal(n)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(steps):
        y = matrix @ x
        size = np.linalg.norm(y)
        if size == 0.0:
            break
        estimate = float(x @ y)
        x = y / size
    return min(POWER_MARGIN * estimate, bound)


class IncrementSolver:
    """Accelerated proximal gradient solver for one step functional.

    Args:
        problem: Assembled step data
        options: Solver options
    """

    def __init__(self, problem: IncrementProblem, options: Optional[StepOptions] = None):
        self.problem = problem
        self.options = options or StepOptions()
        self._stiffness_bound = largest_eigenvalue(problem.stiffness)

    def lipschitz(self, radius: float) -> float:
        """Gradient Lipschitz bound of g on the box of node norms <= radius."""
        curvature = self.problem.energy.curvature_bound(radius)
        return self._stiffness_bound + float(self.problem.weights.max()) * curvature

    def _node_radius(self, v: np.ndarray) -> float:
        return float(np.max(np.linalg.norm(self.problem.nodes(v), axis=1), initial=0.0))

    def solve(self, initial_guess: Optional[np.ndarray] = None) -> Tuple[np.ndarray, StepCertificate]:
        """Minimize the step functional.

        Args:
            initial_guess: Warm start; defaults to u_prev

        Returns:
            Tuple of (minimizer coefficients, certificate)

        Raises:
            NoConvergence: If the residual stays above tol within max_iter iterations
            NonConvexTotal: If negative curvature is detected and not allowed
        """
        problem = self.problem
        start = problem.u_prev.copy() if initial_guess is None else np.asarray(initial_guess, dtype=float).ravel()
        if start.size != problem.size:
            raise IncrementError(f"initial guess has {start.size} entries, expected {problem.size}")

        self._radius = max(self._node_radius(problem.u_prev), self._node_radius(start)) + 1.0
        self._expansions = 0

        retrying = Retrying(
            retry=retry_if_exception_type(CurvatureBoxExit),
            stop=stop_after_attempt(self.options.max_box_expansions + 1),
            reraise=True,
        )
        try:
            for attempt in retrying:
                with attempt:
                    values, iterations, residual, restarts = self._iterate(start, self._radius)
        except CurvatureBoxExit as e:
            raise NoConvergence(
                f"curvature box still too small after {self.options.max_box_expansions} expansions ({e})",
                residual=float('inf'),
            ) from e

        change = problem.objective(values) - problem.objective(problem.u_prev)
        certificate = StepCertificate(
            iterations=iterations,
            residual=residual,
            el_violation=problem.el_violation(values),
            decreased=change <= 1e-12 * (1.0 + abs(problem.objective(problem.u_prev))),
            objective_change=float(change),
            restarts=restarts,
            box_expansions=self._expansions,
        )
        return values, certificate

    def _expand(self, radius: float) -> None:
        self._expansions += 1
        self._radius = 2.0 * radius
        logger.debug(f"Expanding curvature box to radius {self._radius:.4g}")
        raise CurvatureBoxExit(radius)

    def _check_curvature(self, dy: np.ndarray, dgrad: np.ndarray, L: float) -> None:
        size = float(dy @ dy)
        if size <= 1e-16:
            return
        curvature = float(dgrad @ dy) / size
        if curvature < -self.options.curvature_tol * L:
            message = f"negative curvature {curvature:.4g} of the smooth step functional (L = {L:.4g})"
            if not self.options.allow_nonconvex:
                logger.error(message)
                raise NonConvexTotal(message)
            logger.warning(message)

    def _iterate(self, start: np.ndarray, radius: float) -> Tuple[np.ndarray, int, float, int]:
        problem, options = self.problem, self.options
        L = self.lipschitz(radius)
        if L <= 0.0:
            # K = 0 and flat energy: any positive step works
            L = 1.0 / float(problem.weights.max())
        gamma = options.safety / L

        x = start.copy()
        F_x = problem.objective(x)
        y = x
        theta = 1.0
        residual = float('inf')
        restarts = 0
        previous = None

        for iteration in range(options.max_iter):
            gradient = problem.smooth_gradient(y)
            x_new = problem.prox(y - gamma * gradient, gamma)
            residual = problem.prox_residual(x_new, y, gamma)

            if iteration == 0 and residual <= options.tol and np.array_equal(start, problem.u_prev):
                # stuck: u_prev is already stable at this load
                return problem.u_prev.copy(), 1, residual, 0

            if previous is not None:
                self._check_curvature(y - previous[0], gradient - previous[1], L)
            previous = (y, gradient)

            F_new = problem.objective(x_new)
            if F_new > F_x + ROUNDING * (1.0 + abs(F_x)):
                if y is x:
                    # a plain step raised the objective: L was underestimated
                    self._expand(radius)
                restarts += 1
                theta = 1.0
                y = x
                previous = None
                continue

            if self._node_radius(x_new) > radius:
                self._expand(radius)

            if options.accelerate:
                theta_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta * theta))
                y = x_new + ((theta - 1.0) / theta_new) * (x_new - x)
                theta = theta_new
            else:
                y = x_new
            x, F_x = x_new, F_new

            if residual <= options.tol:
                logger.debug(f"Step converged in {iteration + 1} iterations, residual {residual:.3e}, {restarts} restarts")
                return x, iteration + 1, residual, restarts

        raise NoConvergence(
            f"no convergence in {options.max_iter} iterations (residual {residual:.3e} > {options.tol:.1e})",
            residual=residual,
        )


def minimize_increment(
    space: FemSpace,
    u_prev: NodalField,
    t_k: float,
    spec: ProblemSpec,
    opts: Optional[StepOptions] = None,
    initial_guess: Optional[np.ndarray] = None,
) -> Tuple[NodalField, StepCertificate]:
    """Solve one incremental step on a finite element space.

    Args:
        space: FEM space
        u_prev: Previous field
        t_k: Step time
        spec: Problem definition (admissibility is the caller's responsibility)
        opts: Step options
        initial_guess: Warm start other than u_prev

    Returns:
        Tuple of (u_k, certificate)
    """
    started = time.perf_counter()
    problem = build_increment(space, space.check(u_prev), t_k, spec)
    values, certificate = IncrementSolver(problem, opts).solve(initial_guess)
    logger.debug(
        f"t={t_k:.6g}: {certificate.iterations} iterations, residual {certificate.residual:.3e}, "
        f"EL violation {certificate.el_violation:.3e} in {time.perf_counter() - started:.3f}s"
    )
    return space.field(values, time=t_k), certificate


def el_residual(space: FemSpace, u_k: NodalField, u_prev: NodalField, t_k: float, spec: ProblemSpec) -> float:
    """Worst normalized violation of the discrete Euler-Lagrange inequality of step t_k."""
    problem = build_increment(space, space.check(u_prev), t_k, spec)
    return problem.el_violation(space.check(u_k))
