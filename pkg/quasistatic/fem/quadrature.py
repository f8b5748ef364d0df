"""
Quadrature rules on simplices, given in barycentric coordinates with weights
summing to one (multiply by the cell volume to integrate).
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    name: str
    barycentric: np.ndarray
    weights: np.ndarray
    degree: int


def tensor_rule(dimension: int) -> QuadratureRule:
    """Points where A(t, x) is sampled: the midpoint in 1-D, the three edge midpoints in 2-D."""
    if dimension == 1:
        return QuadratureRule('midpoint', np.array([[0.5, 0.5]]), np.array([1.0]), 1)
    points = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    return QuadratureRule('edge_midpoints', points, np.full(3, 1.0 / 3.0), 2)


@lru_cache(maxsize=None)
def _gauss_unit(npts: int):
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def gauss_segment(npts: int):
    """Gauss-Legendre points and weights on [0, 1]."""
    return _gauss_unit(npts)


@lru_cache(maxsize=None)
def simplex_rule(dimension: int, degree: int) -> QuadratureRule:
    """Rule exact for polynomials of the given total degree.

    1-D uses Gauss-Legendre; 2-D collapses a Gauss-Legendre product rule onto
    the triangle (x = u, y = v (1 - u)), absorbing the Jacobian 1 - u.
    """
    npts = max(1, int(np.ceil((degree + 2) / 2)))
    s, w = _gauss_unit(npts)
    if dimension == 1:
        return QuadratureRule(f'gauss{npts}', np.stack([1.0 - s, s], axis=1), w, 2 * npts - 1)

    u, v = np.meshgrid(s, s, indexing='ij')
    wu, wv = np.meshgrid(w, w, indexing='ij')
    x = u.ravel()
    y = (v * (1.0 - u)).ravel()
    weights = 2.0 * (wu * wv * (1.0 - u)).ravel()
    barycentric = np.stack([1.0 - x - y, x, y], axis=1)
    return QuadratureRule(f'stroud{npts}', barycentric, weights, 2 * npts - 2)
