"""
Elliptic tensor, external force, initial datum and the assembled problem definition.
"""
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from .models import ModelError
from .potentials import DissipationPotential, EnergyDensity

SpaceTimeField = Callable[[float, np.ndarray], np.ndarray]
InitialField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EllipticTensor:
    """Fourth-order tensor A(t, x) of the regularizer.

    ``evaluate(t, x)`` takes points of shape (npts, d) and returns an array of
    shape (npts, m, d, m, d), indexed as A[point, i, alpha, j, beta] so that
    xi : A : xi = sum xi[i, alpha] A[i, alpha, j, beta] xi[j, beta].
    """
    name: str
    evaluate: SpaceTimeField
    kappa: float
    lipschitz: float
    components: int = 1
    dimension: int = 1
    parameters: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ForceField:
    """External force f(t, x) with its declared integrability exponents.

    Attributes:
        time_exponent: a in (1, inf] of f in W^{1,a}(0,T; L^p)
        space_exponent: p in [2, inf)
        derivative: analytic time derivative, same signature as evaluate
    """
    name: str
    evaluate: SpaceTimeField
    time_exponent: float = float('inf')
    space_exponent: float = 2.0
    derivative: Optional[SpaceTimeField] = None
    components: int = 1
    parameters: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem definition.

    The Poincare constant is filled in later, once a mesh family is known
    (see ``with_poincare_constant``). The optional ``third_derivative_bound``
    record ({sigma, M}) is carried as metadata only.
    """
    dissipation: DissipationPotential
    energy: EnergyDensity
    tensor: EllipticTensor
    force: ForceField
    initial: InitialField
    horizon: float
    dimension: int
    components: int = 1
    poincare_constant: Optional[float] = None
    third_derivative_bound: Optional[Dict[str, float]] = None
    name: str = 'custom'
    initial_name: str = 'custom'

    def __post_init__(self):
        if not self.horizon > 0:
            raise ModelError(f"horizon T must be positive, got {self.horizon}")
        if self.dimension not in (1, 2):
            raise ModelError(f"only d in {{1, 2}} is supported, got d={self.dimension}")
        if self.tensor.components != self.components or self.force.components != self.components:
            raise ModelError("tensor, force and problem disagree on the number of components")
        if self.tensor.dimension != self.dimension:
            raise ModelError("tensor and problem disagree on the space dimension")

    @property
    def kappa(self) -> float:
        return self.tensor.kappa

    @property
    def mu(self) -> float:
        return self.energy.mu

    @property
    def convexity_margin(self) -> Optional[float]:
        """kappa - mu C_P^2, or None while C_P is unknown."""
        if self.poincare_constant is None:
            return None
        return self.kappa - self.mu * self.poincare_constant ** 2

    def with_poincare_constant(self, value: float) -> 'ProblemSpec':
        return replace(self, poincare_constant=float(value))

    def describe(self) -> Dict[str, Any]:
        """JSON-friendly summary used in manifests and reports."""
        return {
            'name': self.name,
            'dissipation': {'name': self.dissipation.name, **self.dissipation.parameters},
            'energy': {'name': self.energy.name, **self.energy.parameters},
            'tensor': {'name': self.tensor.name, **self.tensor.parameters},
            'force': {'name': self.force.name, **self.force.parameters},
            'initial': self.initial_name,
            'T': self.horizon,
            'd': self.dimension,
            'm': self.components,
            'kappa': self.kappa,
            'mu': self.mu,
            'poincare_constant': self.poincare_constant,
            'third_derivative_bound': self.third_derivative_bound,
        }


def _delta_tensor(components: int, dimension: int) -> np.ndarray:
    return np.einsum('ij,ab->iajb', np.eye(components), np.eye(dimension))


def identity_tensor(scale: float = 1.0, components: int = 1, dimension: int = 1) -> EllipticTensor:
    """A = scale * delta_ij delta_ab, constant in space and time."""
    if not scale > 0:
        raise ModelError(f"identity tensor needs scale > 0, got {scale}")
    base = scale * _delta_tensor(components, dimension)

    def evaluate(t: float, x: np.ndarray) -> np.ndarray:
        npts = np.atleast_2d(x).shape[0]
        return np.broadcast_to(base, (npts,) + base.shape)

    return EllipticTensor(
        name='identity',
        evaluate=evaluate,
        kappa=float(scale),
        lipschitz=0.0,
        components=components,
        dimension=dimension,
        parameters={'scale': scale},
    )


def oscillating_tensor(
    scale: float = 1.0,
    amplitude: float = 0.5,
    components: int = 1,
    dimension: int = 1,
) -> EllipticTensor:
    """A(t, x) = scale (1 + amplitude sin(2 pi x_1) cos t) Id, so kappa = scale (1 - amplitude)."""
    if not scale > 0 or not 0 <= amplitude < 1:
        raise ModelError(f"oscillating tensor needs scale > 0 and 0 <= amplitude < 1, got {scale}, {amplitude}")
    base = _delta_tensor(components, dimension)

    def evaluate(t: float, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        factor = scale * (1.0 + amplitude * np.sin(2.0 * np.pi * x[:, 0]) * np.cos(t))
        return factor[:, None, None, None, None] * base

    return EllipticTensor(
        name='oscillating',
        evaluate=evaluate,
        kappa=scale * (1.0 - amplitude),
        lipschitz=scale * amplitude * (2.0 * np.pi + 1.0),
        components=components,
        dimension=dimension,
        parameters={'scale': scale, 'amplitude': amplitude},
    )


def _profile(name: str) -> Callable[[np.ndarray], np.ndarray]:
    if name == 'constant':
        return lambda x: np.ones(np.atleast_2d(x).shape[0])
    if name == 'sine':
        return lambda x: np.prod(np.sin(np.pi * np.atleast_2d(x)), axis=1)
    raise ModelError(f"unknown force profile '{name}'")


def _direction(direction: Optional[Sequence[float]], components: int) -> np.ndarray:
    if direction is None:
        return np.ones(components)
    vector = np.asarray(direction, dtype=float).ravel()
    if vector.size != components:
        raise ModelError(f"force direction has {vector.size} entries, expected {components}")
    return vector


def _separable_force(
    name: str,
    law: Callable[[float], float],
    rate: Callable[[float], float],
    profile: str,
    direction: Optional[Sequence[float]],
    components: int,
    time_exponent: float,
    parameters: Dict[str, Any],
) -> ForceField:
    shape = _profile(profile)
    vector = _direction(direction, components)

    def evaluate(t: float, x: np.ndarray) -> np.ndarray:
        return law(t) * shape(x)[:, None] * vector

    def derivative(t: float, x: np.ndarray) -> np.ndarray:
        return rate(t) * shape(x)[:, None] * vector

    return ForceField(
        name=name,
        evaluate=evaluate,
        time_exponent=time_exponent,
        derivative=derivative,
        components=components,
        parameters={**parameters, 'profile': profile, 'direction': vector.tolist()},
    )


def zero_force(components: int = 1) -> ForceField:
    return _separable_force('zero', lambda t: 0.0, lambda t: 0.0, 'constant', None,
                            components, float('inf'), {})


def ramp_force(
    slope: float = 1.0,
    offset: float = 0.0,
    profile: str = 'constant',
    direction: Optional[Sequence[float]] = None,
    components: int = 1,
) -> ForceField:
    """f(t, x) = (slope t + offset) profile(x) direction."""
    return _separable_force(
        'ramp',
        lambda t: slope * t + offset,
        lambda t: slope,
        profile, direction, components, float('inf'),
        {'slope': slope, 'offset': offset},
    )


def power_force(
    exponent: float = 0.4,
    amplitude: float = 1.0,
    profile: str = 'constant',
    direction: Optional[Sequence[float]] = None,
    components: int = 1,
) -> ForceField:
    """Rough force f(t, x) = amplitude t^e profile(x).

    For e < 1 the time derivative lies in L^a exactly for a < 1/(1-e); that
    supremum is what gets recorded as the time exponent.
    """
    if not exponent > 0:
        raise ModelError(f"power force needs exponent > 0, got {exponent}")
    time_exponent = 1.0 / (1.0 - exponent) if exponent < 1 else float('inf')

    def rate(t: float) -> float:
        return amplitude * exponent * t ** (exponent - 1.0) if t > 0 else 0.0

    return _separable_force(
        'power',
        lambda t: amplitude * max(t, 0.0) ** exponent,
        rate,
        profile, direction, components, time_exponent,
        {'exponent': exponent, 'amplitude': amplitude},
    )


def oscillating_force(
    amplitude: float = 1.0,
    frequency: float = 1.0,
    profile: str = 'sine',
    direction: Optional[Sequence[float]] = None,
    components: int = 1,
) -> ForceField:
    """f(t, x) = amplitude sin(frequency t) profile(x)."""
    return _separable_force(
        'oscillating',
        lambda t: amplitude * np.sin(frequency * t),
        lambda t: amplitude * frequency * np.cos(frequency * t),
        profile, direction, components, float('inf'),
        {'amplitude': amplitude, 'frequency': frequency},
    )


def zero_initial(components: int = 1) -> InitialField:
    return lambda x: np.zeros((np.atleast_2d(x).shape[0], components))


def sine_bump_initial(amplitude: float = 1.0, components: int = 1) -> InitialField:
    """u0(x) = amplitude prod_i sin(pi x_i) in every component."""
    return lambda x: amplitude * np.prod(np.sin(np.pi * np.atleast_2d(x)), axis=1)[:, None] * np.ones(components)


TENSOR_PRESETS: Dict[str, Callable[..., EllipticTensor]] = {
    'identity': identity_tensor,
    'oscillating': oscillating_tensor,
}

FORCE_PRESETS: Dict[str, Callable[..., ForceField]] = {
    'zero': zero_force,
    'ramp': ramp_force,
    'power': power_force,
    'oscillating': oscillating_force,
}

INITIAL_PRESETS: Dict[str, Callable[..., InitialField]] = {
    'zero': zero_initial,
    'sine_bump': sine_bump_initial,
}
