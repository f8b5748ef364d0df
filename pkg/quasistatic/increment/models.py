from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Mapping, Optional

from ..config import config
from ..models import QuasistaticError


class IncrementError(QuasistaticError):
    """Base exception for the incremental step solver."""
    pass


class NoConvergence(IncrementError):
    """Raised when the iteration cap is hit before the residual reaches the tolerance.

    Attributes:
        residual: Last fixed-point residual
        step: Index of the time step, when known
    """

    def __init__(self, message: str, residual: float, step: Optional[int] = None):
        super().__init__(message)
        self.residual = residual
        self.step = step

    def at_step(self, step: int) -> 'NoConvergence':
        return NoConvergence(f"step {step}: {self}", residual=self.residual, step=step)


class NonConvexTotal(IncrementError):
    """Raised when the smooth part of the step functional shows negative curvature."""
    pass


class CurvatureBoxExit(IncrementError):
    """An iterate left the box the step size was estimated on."""

    def __init__(self, radius: float):
        super().__init__(f"iterate left the curvature box of radius {radius:.4g}")
        self.radius = radius


@dataclass
class StepOptions:
    """Options of the forward-backward step solver.

    Attributes:
        tol: Tolerance on the prox residual, in units of the load density
        max_iter: Iteration cap per step
        safety: Step size is safety / L
        accelerate: Use momentum with function-value restart
        el_tolerance: Largest accepted Euler-Lagrange violation in the certificate
        max_box_expansions: How often the curvature box may grow before giving up
        curvature_tol: Relative negative curvature tolerated before NonConvexTotal
        allow_nonconvex: Log negative curvature instead of raising
    """
    tol: float = field(default_factory=lambda: config.solver.step_tol)
    max_iter: int = field(default_factory=lambda: config.solver.step_maxiter)
    safety: float = 0.9
    accelerate: bool = True
    el_tolerance: float = 1e-6
    max_box_expansions: int = 5
    curvature_tol: float = 1e-6
    allow_nonconvex: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise IncrementError(f"tol must be positive, got {self.tol}")
        if not 0 < self.safety < 1:
            raise IncrementError(f"safety factor must lie in (0, 1), got {self.safety}")
        if self.max_iter < 1:
            raise IncrementError(f"max_iter must be at least 1, got {self.max_iter}")

    @classmethod
    def from_dict(cls, overrides: Optional[Mapping[str, Any]]) -> 'StepOptions':
        """Build options from the ``increment`` section of a run document."""
        overrides = dict(overrides or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise IncrementError(f"unknown increment options: {', '.join(unknown)}")
        return cls(**overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class StepCertificate:
    """Evidence that a step solve produced an incremental minimizer.

    Attributes:
        iterations: Iterations used, restarts included
        residual: Final prox residual
        el_violation: Worst normalized Euler-Lagrange violation over the test directions
        decreased: F(u_k) <= F(u_prev)
        objective_change: F(u_k) - F(u_prev)
        restarts: Momentum restarts
        box_expansions: Curvature box re-estimates
    """
    iterations: int
    residual: float
    el_violation: float
    decreased: bool
    objective_change: float = 0.0
    restarts: int = 0
    box_expansions: int = 0

    def passed(self, options: StepOptions) -> bool:
        return self.decreased and self.residual <= options.tol and self.el_violation <= options.el_tolerance

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
