from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ..models import QuasistaticError, Suite


class HarnessError(QuasistaticError):
    """Raised when a benchmark cannot be set up or evaluated."""
    pass


class InsufficientLevels(HarnessError):
    """Raised when a rate fit gets fewer than three refinement levels."""
    pass


class ConfigurationError(HarnessError):
    """Raised when a run document is missing, unreadable or malformed."""
    pass


@dataclass(frozen=True, eq=False)
class RateFit:
    """Log-log least-squares fit of squared errors against a discretization parameter.

    Attributes:
        params: Parameter values (h or tau), strictly decreasing
        sq_errors: Squared errors, one per parameter
        slope: Fitted exponent
        intercept: Fitted log-constant
        r_squared: Coefficient of determination
        theory: Theoretical exponent the slope is compared with
        passed: slope >= 0.9 theory
        parameter: 'h' or 'tau'
        fixed: Value of the parameter held fixed during the sweep
    """
    params: np.ndarray
    sq_errors: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    theory: float = 1.0
    passed: bool = True
    parameter: str = 'h'
    fixed: float = 0.0

    def __post_init__(self):
        if len(self.params) < 3:
            raise InsufficientLevels(f"a rate fit needs at least 3 levels, got {len(self.params)}")
        if len(self.params) != len(self.sq_errors):
            raise HarnessError("params and sq_errors differ in length")
        if np.any(np.diff(self.params) >= 0):
            raise HarnessError("rate-fit parameters must be strictly decreasing")
        if not np.isfinite(self.slope):
            raise HarnessError(f"fitted slope is not finite: {self.slope}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RateFit):
            return NotImplemented
        return (np.array_equal(self.params, other.params) and np.array_equal(self.sq_errors, other.sq_errors)
                and (self.slope, self.intercept, self.r_squared, self.theory, self.passed, self.parameter, self.fixed)
                == (other.slope, other.intercept, other.r_squared, other.theory, other.passed, other.parameter,
                    other.fixed))

    @property
    def monotone(self) -> bool:
        """Errors decrease strictly with the parameter."""
        return bool(np.all(np.diff(self.sq_errors) < 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'parameter': self.parameter,
            'params': [float(p) for p in self.params],
            'sq_errors': [float(e) for e in self.sq_errors],
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'theory': self.theory,
            'passed': self.passed,
            'fixed': self.fixed,
        }


@dataclass
class SweepSettings:
    """Refinement levels of an (h, tau) sweep.

    ``fixed_space``/``fixed_time`` default to the finest level of the other sweep.
    """
    space_levels: List[int] = field(default_factory=lambda: [16, 32, 64, 128])
    time_levels: List[int] = field(default_factory=lambda: [125, 250, 500, 1000])
    fixed_space: Optional[int] = None
    fixed_time: Optional[int] = None
    time_reference: str = 'exact'

    def __post_init__(self):
        if self.time_reference not in ('exact', 'refined'):
            raise ConfigurationError(f"time_reference must be 'exact' or 'refined', got '{self.time_reference}'")
        if any(n < 2 for n in self.space_levels) or any(N < 1 for N in self.time_levels):
            raise ConfigurationError("space levels need n >= 2 and time levels N >= 1")

    @property
    def space_fixed(self) -> int:
        return self.fixed_space if self.fixed_space is not None else max(self.space_levels)

    @property
    def time_fixed(self) -> int:
        return self.fixed_time if self.fixed_time is not None else max(self.time_levels)


@dataclass
class RunConfig:
    """One experiment: problem reference, discretization levels, seeds, outputs and suites.

    Attributes:
        problem: Built-in problem name or an inline problem definition
        n_space: Cells per unit length (n >= 2)
        n_time: Number of time steps (N >= 1)
        seed: Seed of every random sampler
        output_dir: Where results are written
        suites: Estimate suites to run
        increment: StepOptions overrides
        sweep: Sweep levels
    """
    problem: Any = 'exact_1d'
    n_space: int = 32
    n_time: int = 200
    seed: int = 0
    output_dir: Path = Path('results')
    suites: List[Suite] = field(default_factory=lambda: [Suite.ALL])
    increment: Dict[str, Any] = field(default_factory=dict)
    sweep: SweepSettings = field(default_factory=SweepSettings)

    def __post_init__(self):
        if self.n_space < 2:
            raise ConfigurationError(f"n_space must be at least 2, got {self.n_space}")
        if self.n_time < 1:
            raise ConfigurationError(f"n_time must be at least 1, got {self.n_time}")
        self.output_dir = Path(self.output_dir)

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> 'RunConfig':
        """Build a run configuration from a parsed document.

        Raises:
            ConfigurationError: On unknown keys or invalid values
        """
        known = {'problem', 'n_space', 'n_time', 'seed', 'output_dir', 'suites', 'increment', 'sweep'}
        unknown = set(document) - known
        if unknown:
            raise ConfigurationError(f"unknown run configuration keys: {', '.join(sorted(unknown))}")
        try:
            suites = [Suite(s) for s in document.get('suites', ['all'])]
            sweep = SweepSettings(**document.get('sweep', {}))
            return cls(
                problem=document.get('problem', 'exact_1d'),
                n_space=int(document.get('n_space', 32)),
                n_time=int(document.get('n_time', 200)),
                seed=int(document.get('seed', 0)),
                output_dir=Path(document.get('output_dir', 'results')),
                suites=suites,
                increment=dict(document.get('increment', {})),
                sweep=sweep,
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid run configuration: {e}") from e
