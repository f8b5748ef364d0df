"""
Pointwise densities of the problem: the rate-independent dissipation R1 and the
stored energy W0.

Every density acts on arrays whose trailing axis holds the m field components,
so a single call evaluates all nodes of a finite element field at once.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np

from .models import ModelError

ArrayLike = Union[float, np.ndarray]


def _norm(v: np.ndarray) -> np.ndarray:
    return np.linalg.norm(v, axis=-1)


def _outer(v: np.ndarray) -> np.ndarray:
    return v[..., :, None] * v[..., None, :]


def _eye_like(v: np.ndarray) -> np.ndarray:
    m = v.shape[-1]
    return np.broadcast_to(np.eye(m), v.shape[:-1] + (m, m))


@dataclass(frozen=True)
class DissipationPotential:
    """Convex, positively 1-homogeneous dissipation density R1 on R^m.

    ``prox(x, lam)`` returns argmin_z lam * R1(z) + |z - x|^2 / 2 row by row;
    ``lam`` broadcasts against the leading axes of ``x``.
    """
    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    prox: Callable[[np.ndarray, ArrayLike], np.ndarray]
    lipschitz_bound: float
    lower_bound_coeff: float
    parameters: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class EnergyDensity:
    """Stored energy density W0 with its growth and semi-monotonicity data.

    Attributes:
        curvature_bound: R -> sup over |v| <= R of the spectral norm of D^2 W0(v)
        growth_exponent: q
        growth_constant: C of the growth bounds
        mu: semi-monotonicity modulus of DW0
    """
    name: str
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    curvature_bound: Callable[[float], float]
    growth_exponent: float
    growth_constant: float
    mu: float
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    parameters: Dict[str, Any] = field(default_factory=dict)


def builtin_abs_dissipation(scale: float = 1.0) -> DissipationPotential:
    """R1(w) = scale * |w| with block soft-thresholding as its prox.

    Args:
        scale: Positive multiple of the Euclidean norm

    Returns:
        The dissipation potential

    Raises:
        ModelError: If scale is not positive
    """
    if not scale > 0:
        raise ModelError(f"abs dissipation needs scale > 0, got {scale}")

    def evaluate(w: np.ndarray) -> np.ndarray:
        return scale * _norm(np.asarray(w, dtype=float))

    def prox(x: np.ndarray, lam: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        size = _norm(x)
        threshold = np.asarray(lam, dtype=float) * scale
        # x = 0 maps to 0, the unique minimizer
        factor = np.zeros_like(size)
        np.divide(threshold, size, out=factor, where=size > 0)
        factor = np.where(size > 0, np.maximum(1.0 - factor, 0.0), 0.0)
        return x * factor[..., None]

    return DissipationPotential(
        name='abs',
        evaluate=evaluate,
        prox=prox,
        lipschitz_bound=scale,
        lower_bound_coeff=scale,
        parameters={'scale': scale},
    )


def builtin_weighted_l1(scales: Sequence[float]) -> DissipationPotential:
    """R1(w) = sum_i s_i |w_i|; the prox thresholds each component separately."""
    s = np.asarray(scales, dtype=float).ravel()
    if s.size == 0 or np.any(s <= 0):
        raise ModelError(f"weighted_l1 needs positive scales, got {list(scales)}")

    def evaluate(w: np.ndarray) -> np.ndarray:
        return np.sum(s * np.abs(np.asarray(w, dtype=float)), axis=-1)

    def prox(x: np.ndarray, lam: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        threshold = np.asarray(lam, dtype=float)[..., None] * s
        return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)

    return DissipationPotential(
        name='weighted_l1',
        evaluate=evaluate,
        prox=prox,
        lipschitz_bound=float(np.linalg.norm(s)),
        lower_bound_coeff=float(s.min()),
        parameters={'scales': s.tolist()},
    )


def builtin_double_well(gamma: float) -> EnergyDensity:
    """Nonconvex double-well W0(v) = gamma (|v|^2 - 1)^2 with q = 4, mu = 4 gamma.

    Args:
        gamma: Well depth, must be positive

    Returns:
        The energy density

    Raises:
        ModelError: If gamma is not positive
    """
    if not gamma > 0:
        raise ModelError(f"double well needs gamma > 0, got {gamma}")

    def value(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return gamma * (np.sum(v * v, axis=-1) - 1.0) ** 2

    def gradient(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return 4.0 * gamma * (np.sum(v * v, axis=-1) - 1.0)[..., None] * v

    def hessian(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        r2 = np.sum(v * v, axis=-1)
        return 4.0 * gamma * ((r2 - 1.0)[..., None, None] * _eye_like(v) + 2.0 * _outer(v))

    def curvature_bound(radius: float) -> float:
        return 4.0 * gamma * max(1.0, 3.0 * radius ** 2 - 1.0)

    return EnergyDensity(
        name='double_well',
        value=value,
        gradient=gradient,
        hessian=hessian,
        curvature_bound=curvature_bound,
        growth_exponent=4.0,
        growth_constant=max(2.0 / gamma, 8.0 * gamma),
        mu=4.0 * gamma,
        parameters={'gamma': gamma},
    )


def quadratic_energy(stiffness: float = 1.0, center: ArrayLike = 0.0) -> EnergyDensity:
    """Convex W0(v) = stiffness/2 |v - center|^2."""
    if not stiffness > 0:
        raise ModelError(f"quadratic energy needs stiffness > 0, got {stiffness}")
    c = float(stiffness)
    a = np.asarray(center, dtype=float)
    shift = float(np.linalg.norm(np.atleast_1d(a)))

    def value(v: np.ndarray) -> np.ndarray:
        d = np.asarray(v, dtype=float) - a
        return 0.5 * c * np.sum(d * d, axis=-1)

    def gradient(v: np.ndarray) -> np.ndarray:
        return c * (np.asarray(v, dtype=float) - a)

    def hessian(v: np.ndarray) -> np.ndarray:
        return c * _eye_like(np.asarray(v, dtype=float))

    return EnergyDensity(
        name='quadratic',
        value=value,
        gradient=gradient,
        hessian=hessian,
        curvature_bound=lambda radius: c,
        growth_exponent=2.0,
        growth_constant=max(4.0 / c, c, c * shift ** 2, c * shift),
        mu=0.0,
        parameters={'stiffness': c, 'center': a.tolist()},
    )


def power_energy(q: float) -> EnergyDensity:
    """Convex W0(v) = |v|^q for q >= 2."""
    if not q >= 2:
        raise ModelError(f"power energy needs q >= 2, got {q}")

    def value(v: np.ndarray) -> np.ndarray:
        return _norm(np.asarray(v, dtype=float)) ** q

    def gradient(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return q * (_norm(v) ** (q - 2.0))[..., None] * v

    def hessian(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        r = _norm(v)
        radial = q * r ** (q - 2.0)
        unit = np.zeros_like(v)
        np.divide(v, r[..., None], out=unit, where=r[..., None] > 0)
        # q(q-2) r^(q-2) along v, written with the unit vector to stay finite at 0
        along = q * (q - 2.0) * r ** (q - 2.0)
        return radial[..., None, None] * _eye_like(v) + along[..., None, None] * _outer(unit)

    return EnergyDensity(
        name='power',
        value=value,
        gradient=gradient,
        hessian=hessian,
        curvature_bound=lambda radius: q * (q - 1.0) * max(radius, 0.0) ** (q - 2.0),
        growth_exponent=float(q),
        growth_constant=float(q),
        mu=0.0,
        parameters={'q': q},
    )


def shifted_power_energy(q: float) -> EnergyDensity:
    """Convex W0(v) = (|v| + 1)^(q-2) |v|^2 for q > 1, quadratic near the origin."""
    if not q > 1:
        raise ModelError(f"shifted power energy needs q > 1, got {q}")

    def value(v: np.ndarray) -> np.ndarray:
        r = _norm(np.asarray(v, dtype=float))
        return (r + 1.0) ** (q - 2.0) * r ** 2

    def gradient(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        r = _norm(v)
        return ((r + 1.0) ** (q - 3.0) * (q * r + 2.0))[..., None] * v

    def hessian(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        r = _norm(v)
        radial = (r + 1.0) ** (q - 3.0) * (q * r + 2.0)
        along = (r + 1.0) ** (q - 4.0) * (q - 2.0) * (q * r + 3.0) * r
        unit = np.zeros_like(v)
        np.divide(v, r[..., None], out=unit, where=r[..., None] > 0)
        return radial[..., None, None] * _eye_like(v) + along[..., None, None] * _outer(unit)

    def curvature_bound(radius: float) -> float:
        k = max(q * (q - 1.0), 2.0 * (q - 1.0), 2.0, q)
        return k * ((radius + 1.0) ** (q - 2.0) if q >= 2 else 1.0)

    return EnergyDensity(
        name='shifted_power',
        value=value,
        gradient=gradient,
        hessian=hessian,
        curvature_bound=curvature_bound,
        growth_exponent=float(q),
        growth_constant=max(2.0 ** (q - 1.0), (q + 2.0) * 2.0 ** max(q - 2.0, 0.0), 2.0 ** (2.0 - q), 1.0),
        mu=0.0,
        parameters={'q': q},
    )


DISSIPATION_PRESETS: Dict[str, Callable[..., DissipationPotential]] = {
    'abs': builtin_abs_dissipation,
    'weighted_l1': builtin_weighted_l1,
}

ENERGY_PRESETS: Dict[str, Callable[..., EnergyDensity]] = {
    'double_well': builtin_double_well,
    'quadratic': quadratic_energy,
    'power': power_energy,
    'shifted_power': shifted_power_energy,
}
