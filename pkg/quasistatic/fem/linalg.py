"""
Linear solves and matrix dumps.
"""
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg

from ..config import config
from ..logger import get_logger
from .models import LinearSolveFailure

logger = get_logger(__name__)


def solve_spd(
    matrix: sparse.spmatrix,
    rhs: np.ndarray,
    x0: Optional[np.ndarray] = None,
    rtol: Optional[float] = None,
    maxiter: Optional[int] = None,
) -> np.ndarray:
    """Conjugate gradients on a symmetric positive definite system.

    Args:
        matrix: SPD matrix
        rhs: Right-hand side
        x0: Initial guess
        rtol: Relative residual tolerance (defaults to config.solver.cg_rtol)
        maxiter: Iteration cap (defaults to cg_maxiter_factor * n)

    Returns:
        The solution vector

    Raises:
        LinearSolveFailure: If CG does not reach the tolerance
    """
    rhs = np.asarray(rhs, dtype=float)
    if not np.any(rhs):
        return np.zeros_like(rhs)
    rtol = config.solver.cg_rtol if rtol is None else rtol
    if maxiter is None:
        maxiter = config.solver.cg_maxiter_factor * max(rhs.size, 1)

    solution, info = cg(matrix, rhs, x0=x0, rtol=rtol, atol=0.0, maxiter=maxiter)
    if info != 0:
        residual = np.linalg.norm(rhs - matrix @ solution) / np.linalg.norm(rhs)
        logger.error(f"CG failed (info={info}) on n={rhs.size}, relative residual {residual:.3e}")
        raise LinearSolveFailure(
            f"conjugate gradients stopped with info={info}, relative residual {residual:.3e} > {rtol:.1e}"
        )
    return solution


def dump_triplets(matrix: sparse.spmatrix, path: Path) -> Path:
    """Write a sparse matrix as ``i j value`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coo = sparse.coo_matrix(matrix)
    with open(path, 'w') as f:
        for i, j, value in zip(coo.row, coo.col, coo.data):
            f.write(f"{i} {j} {float(value)!r}\n")
    return path
