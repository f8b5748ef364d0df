"""
Discrete Poincare constants from the smallest Dirichlet eigenvalue of the
(stiffness, mass) pencil.
"""
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from ..config import config
from ..logger import get_logger
from .models import EigenSolveFailure, MeshError

logger = get_logger(__name__)


def smallest_eigenpair(
    stiffness: sparse.spmatrix,
    mass: sparse.spmatrix,
    tol: Optional[float] = None,
    maxiter: Optional[int] = None,
) -> Tuple[float, np.ndarray]:
    """Inverse power iteration with shift 0 on K x = lambda M x.

    Args:
        stiffness: SPD stiffness matrix K
        mass: SPD mass matrix M
        tol: Relative tolerance on successive Rayleigh quotients
        maxiter: Iteration budget

    Returns:
        Tuple of (lambda_min, M-normalized eigenvector)

    Raises:
        EigenSolveFailure: If the Rayleigh quotient has not settled within the budget
    """
    from ..fem.linalg import solve_spd
    from ..fem.models import LinearSolveFailure

    tol = config.solver.eigen_tol if tol is None else tol
    maxiter = config.solver.eigen_maxiter if maxiter is None else maxiter

    x = np.ones(stiffness.shape[0])
    x /= np.sqrt(x @ (mass @ x))
    rayleigh = x @ (stiffness @ x)

    for iteration in range(1, maxiter + 1):
        try:
            y = solve_spd(stiffness, mass @ x, x0=x / rayleigh)
        except LinearSolveFailure as e:
            raise EigenSolveFailure(f"inner solve failed at iteration {iteration}: {e}") from e
        x = y / np.sqrt(y @ (mass @ y))
        previous, rayleigh = rayleigh, x @ (stiffness @ x)
        if abs(previous - rayleigh) <= tol * rayleigh:
            logger.debug(f"Inverse iteration converged in {iteration} steps: lambda = {rayleigh:.12g}")
            return float(rayleigh), x

    raise EigenSolveFailure(
        f"inverse iteration did not converge in {maxiter} steps (last lambda = {rayleigh:.12g})"
    )


def poincare_constant(space, mass: str = 'consistent') -> float:
    """C_P^h = 1 / sqrt(lambda_min) on the zero-trace scalar P1 space.

    Args:
        space: A FemSpace; its unit-tensor stiffness is used
        mass: 'consistent' for the assembled mass matrix, 'lumped' for the
            row-sum weights the incremental functional integrates W0 with

    Returns:
        The discrete Poincare constant
    """
    stiffness, consistent = space.scalar_operators()
    if mass == 'consistent':
        matrix = consistent
    elif mass == 'lumped':
        matrix = sparse.diags(space.lumped_mass()).tocsr()
    else:
        raise MeshError(f"mass must be 'consistent' or 'lumped', got '{mass}'")
    lam, _ = smallest_eigenpair(stiffness, matrix)
    value = 1.0 / np.sqrt(lam)
    logger.info(f"Poincare constant ({mass} mass) on h = {space.mesh.h:.4g}: {value:.8f}")
    return float(value)


def gating_poincare_constant(space) -> float:
    """The larger of the consistent and lumped constants.

    The increment integrates W0 with lumped weights, whose constant exceeds
    C_P while the consistent one lies below it; mild convexity must hold
    for both.
    """
    return max(poincare_constant(space), poincare_constant(space, mass='lumped'))
