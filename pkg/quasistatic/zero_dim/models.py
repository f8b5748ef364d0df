from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..models import QuasistaticError, SolutionMode


class ZeroDimError(QuasistaticError):
    """Base exception for the zero-dimensional example."""
    pass


class OutOfDomain(ZeroDimError):
    """Raised when a closed-form solution is requested outside its time interval."""
    pass


class BranchExit(ZeroDimError):
    """Raised when the branch-restricted stepper reaches the convexity boundary z = 0.

    Attributes:
        time: Step time at which the boundary was hit
        last_value: Last accepted value before the exit
    """

    def __init__(self, time: float, last_value: float):
        super().__init__(f"strong branch left its convex region at t={time:.6g} (last u={last_value:.6g})")
        self.time = time
        self.last_value = last_value


@dataclass(eq=False)
class ScalarTrajectory:
    """Scalar evolution sampled on a time grid.

    The force is f(t) = force_rate * t.
    """
    times: np.ndarray
    values: np.ndarray
    mode: SolutionMode
    force_rate: float = 1.0
    exit_time: Optional[float] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ZeroDimError("time grid and values must be 1-D arrays of equal length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ZeroDimError("time grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ZeroDimError("trajectory values must be finite")

    def __len__(self) -> int:
        return self.times.size

    def value_at(self, t: float) -> float:
        """Piecewise-affine interpolation of the samples."""
        return float(np.interp(t, self.times, self.values))
