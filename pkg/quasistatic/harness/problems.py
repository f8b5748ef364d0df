"""
Built-in benchmark problems and their exact solutions.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from ..model.data import ProblemSpec, identity_tensor, power_force, ramp_force, zero_initial
from ..model.potentials import builtin_abs_dissipation, builtin_double_well, quadratic_energy
from ..zero_dim.oracle import scalar_pde_reference
from .models import HarnessError


@dataclass(frozen=True)
class ExactSolution:
    """Space-time field with its spatial gradient.

    ``value(t, points)`` returns (npts, m); ``gradient(t, points)`` returns (npts, m, d).
    """
    name: str
    value: Callable[[float, np.ndarray], np.ndarray]
    gradient: Callable[[float, np.ndarray], np.ndarray]


def _scalar_value(t: float, points: np.ndarray) -> np.ndarray:
    value, _ = scalar_pde_reference(np.clip(points[:, 0], 0.0, 1.0), t)
    return value[:, None]


def _scalar_gradient(t: float, points: np.ndarray) -> np.ndarray:
    _, gradient = scalar_pde_reference(np.clip(points[:, 0], 0.0, 1.0), t)
    return gradient[:, None, None]


SCALAR_EXACT = ExactSolution('max(t-1,0) phi(x)', _scalar_value, _scalar_gradient)

ZERO_EXACT = ExactSolution(
    'zero',
    lambda t, points: np.zeros((points.shape[0], 1)),
    lambda t, points: np.zeros((points.shape[0], 1, points.shape[1])),
)


def exact_problem_1d(horizon: float = 2.0) -> ProblemSpec:
    """R1 = |.|, W0 = u^2/2, A = 1, f = t, u0 = 0 on (0, 1).

    The solution sticks at 0 until t = 1 and then grows like (t-1) phi(x).
    """
    return ProblemSpec(
        dissipation=builtin_abs_dissipation(),
        energy=quadratic_energy(1.0),
        tensor=identity_tensor(dimension=1),
        force=ramp_force(slope=1.0),
        initial=zero_initial(),
        horizon=horizon,
        dimension=1,
        name='exact_1d',
        initial_name='zero',
    )


def rough_problem_1d(exponent: float = 0.4, horizon: float = 2.0) -> ProblemSpec:
    """The 1-D exact problem with the rough force f = 2^(1-e) t^e, which agrees with t at t = 2."""
    return ProblemSpec(
        dissipation=builtin_abs_dissipation(),
        energy=quadratic_energy(1.0),
        tensor=identity_tensor(dimension=1),
        force=power_force(exponent=exponent, amplitude=2.0 ** (1.0 - exponent)),
        initial=zero_initial(),
        horizon=horizon,
        dimension=1,
        name='rough_1d',
        initial_name='zero',
    )


def double_well_problem(gamma: float = 0.1, dimension: int = 2, slope: float = 2.0,
                        horizon: float = 1.0) -> ProblemSpec:
    """Mildly nonconvex double-well with a sine-profile ramp load on the unit interval or square."""
    return ProblemSpec(
        dissipation=builtin_abs_dissipation(),
        energy=builtin_double_well(gamma),
        tensor=identity_tensor(dimension=dimension),
        force=ramp_force(slope=slope, profile='sine'),
        initial=zero_initial(),
        horizon=horizon,
        dimension=dimension,
        name=f'double_well_{dimension}d',
        initial_name='zero',
    )


def zero_problem(dimension: int = 1, horizon: float = 1.0) -> ProblemSpec:
    """No load and no initial displacement: every trajectory is identically zero."""
    return ProblemSpec(
        dissipation=builtin_abs_dissipation(),
        energy=quadratic_energy(1.0),
        tensor=identity_tensor(dimension=dimension),
        force=ramp_force(slope=0.0),
        initial=zero_initial(),
        horizon=horizon,
        dimension=dimension,
        name='zero',
        initial_name='zero',
    )


PROBLEMS: Dict[str, Callable[[], ProblemSpec]] = {
    'exact_1d': exact_problem_1d,
    'rough_1d': rough_problem_1d,
    'double_well_1d': lambda: double_well_problem(dimension=1),
    'double_well_2d': lambda: double_well_problem(dimension=2),
    'zero': zero_problem,
}

EXACT_SOLUTIONS: Dict[str, ExactSolution] = {
    'exact_1d': SCALAR_EXACT,
    'zero': ZERO_EXACT,
}


def builtin_problem(name: str) -> ProblemSpec:
    factory = PROBLEMS.get(name)
    if factory is None:
        raise HarnessError(f"unknown problem '{name}' (known: {', '.join(sorted(PROBLEMS))})")
    return factory()


def exact_solution(name: str) -> Optional[ExactSolution]:
    """Closed-form solution of a built-in problem, or None when only a reference run is available."""
    return EXACT_SOLUTIONS.get(name)
