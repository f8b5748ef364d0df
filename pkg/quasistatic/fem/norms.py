"""
Integral norms of P1 fields and their errors against exact functions.
"""
from typing import Callable, Tuple

import numpy as np

from .models import UnsupportedExponent
from .quadrature import simplex_rule
from .space import FemSpace

SUPPORTED_EXPONENTS = (2, 4, 6)
ERROR_DEGREE = 8


def l2(space: FemSpace, v: np.ndarray) -> float:
    """||v||_{L2}, exact through the consistent mass matrix."""
    v = np.asarray(v, dtype=float).ravel()
    return float(np.sqrt(max(v @ (space.assemble_mass() @ v), 0.0)))


def h1_semi(space: FemSpace, v: np.ndarray) -> float:
    """||grad v||_{L2}."""
    grads = space.cell_gradients(v)
    return float(np.sqrt(np.sum(space.mesh.volumes * np.sum(grads ** 2, axis=(1, 2)))))


def _quadrature_values(space: FemSpace, v: np.ndarray, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    rule = simplex_rule(space.dimension, degree)
    full = space.extend(v)
    values = np.einsum('qa,cai->cqi', rule.barycentric, full[space.mesh.cells])
    return values, rule.weights


def _lp_quadrature(space: FemSpace, v: np.ndarray, p: float) -> float:
    values, weights = _quadrature_values(space, v, int(np.ceil(p)))
    size = np.linalg.norm(values, axis=-1) ** p
    return float(np.sum(space.mesh.volumes * (size @ weights)) ** (1.0 / p))


def lp(space: FemSpace, v: np.ndarray, p: int) -> float:
    """||v||_{L^p} for p in {2, 4, 6}, by quadrature exact for |v|^p on P1 fields.

    Raises:
        UnsupportedExponent: For any other p
    """
    if p not in SUPPORTED_EXPONENTS:
        raise UnsupportedExponent(f"L^p norms are available for p in {SUPPORTED_EXPONENTS}, got p={p}")
    return _lp_quadrature(space, v, p)


def gradient_lp(space: FemSpace, v: np.ndarray, p: float) -> float:
    """||grad v||_{L^p} with the Frobenius norm of the cellwise constant gradient."""
    grads = space.cell_gradients(v)
    size = np.sqrt(np.sum(grads ** 2, axis=(1, 2)))
    return float(np.sum(space.mesh.volumes * size ** p) ** (1.0 / p))


def error_norms(
    space: FemSpace,
    v: np.ndarray,
    exact_value: Callable[[np.ndarray], np.ndarray],
    exact_gradient: Callable[[np.ndarray], np.ndarray],
    degree: int = ERROR_DEGREE,
) -> Tuple[float, float]:
    """Squared L2 and H1-seminorm errors of a P1 field against an exact function.

    Args:
        space: Space of v
        v: Interior coefficients
        exact_value: points (npts, d) -> values (npts, m)
        exact_gradient: points (npts, d) -> gradients (npts, m, d)
        degree: Degree of the element quadrature

    Returns:
        Tuple of (||v - u||_{L2}^2, ||grad(v - u)||_{L2}^2)
    """
    rule = simplex_rule(space.dimension, degree)
    nc, nq = space.mesh.num_cells, rule.weights.size
    m, d = space.components, space.dimension
    points = np.einsum('qa,cad->cqd', rule.barycentric, space.mesh.cell_coordinates).reshape(-1, d)

    values, _ = _quadrature_values(space, v, degree)
    exact = np.asarray(exact_value(points), dtype=float).reshape(nc, nq, m)
    value_error = np.sum((values - exact) ** 2, axis=-1) @ rule.weights

    grads = space.cell_gradients(v)
    exact_grads = np.asarray(exact_gradient(points), dtype=float).reshape(nc, nq, m, d)
    gradient_error = np.sum((grads[:, None] - exact_grads) ** 2, axis=(-2, -1)) @ rule.weights

    volumes = space.mesh.volumes
    return float(volumes @ value_error), float(volumes @ gradient_error)
