from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..fem.models import NodalField
from ..fem.space import FemSpace
from ..increment.models import StepCertificate, StepOptions
from ..models import QuasistaticError


class RotheError(QuasistaticError):
    """Base exception for the time loop."""
    pass


class InitialInstability(UserWarning):
    """The k = 0 step moved away from the projected initial datum."""
    pass


@dataclass(eq=False)
class Trajectory:
    """Discrete evolution u^h_tau on a uniform time grid.

    ``values[k]`` holds the coefficients of u^h_k; the interpolant is affine on
    every (t_{k-1}, t_k] and u^h_{-1} = u^h_0, so the first difference
    quotient vanishes.
    """
    space: FemSpace
    times: np.ndarray
    values: np.ndarray
    certificates: List[StepCertificate] = field(default_factory=list)
    initial_margin: float = 0.0
    timings: List[float] = field(default_factory=list)
    options: Optional[StepOptions] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape != (self.times.size, self.space.num_dofs):
            raise RotheError(
                f"values have shape {self.values.shape}, expected {(self.times.size, self.space.num_dofs)}"
            )
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise RotheError("time grid must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def tau(self) -> float:
        return float(self.times[1] - self.times[0]) if self.steps else 0.0

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def all_passed(self) -> bool:
        return all(c.decreased for c in self.certificates)

    @property
    def failed_steps(self) -> List[int]:
        """Steps k whose certificate fails the step options; without options only decrease is checked."""
        if self.options is None:
            return [k for k, c in enumerate(self.certificates, start=1) if not c.decreased]
        return [k for k, c in enumerate(self.certificates, start=1) if not c.passed(self.options)]

    def field(self, k: int) -> NodalField:
        return self.space.field(self.values[k], time=float(self.times[k]))

    def interpolate(self, t: float) -> np.ndarray:
        """Coefficients of u^h_tau(t); exact at grid times."""
        if t <= self.times[0]:
            return self.values[0].copy()
        if t >= self.times[-1]:
            return self.values[-1].copy()
        k = int(np.searchsorted(self.times, t, side='left'))
        if self.times[k] == t:
            return self.values[k].copy()
        theta = (t - self.times[k - 1]) / (self.times[k] - self.times[k - 1])
        return (1.0 - theta) * self.values[k - 1] + theta * self.values[k]

    def evaluate(self, t: float, points: np.ndarray) -> np.ndarray:
        """u^h_tau(t, x) at the given points, shape (npts, m)."""
        return self.space.evaluate(self.interpolate(t), points)

    def difference_quotient(self, k: int) -> np.ndarray:
        """delta_k = (u_k - u_{k-1}) / tau, zero for k = 0."""
        if k == 0:
            return np.zeros(self.space.num_dofs)
        return (self.values[k] - self.values[k - 1]) / (self.times[k] - self.times[k - 1])

    def difference_quotients(self) -> np.ndarray:
        quotients = np.zeros_like(self.values)
        quotients[1:] = np.diff(self.values, axis=0) / np.diff(self.times)[:, None]
        return quotients


@dataclass
class InitialStability:
    """Outcome of the k = 0 solve from the projected initial datum."""
    stable: bool
    margin: float
    tolerance: float
    certificate: Optional[StepCertificate] = None

    def __bool__(self) -> bool:
        return self.stable
