from dataclasses import dataclass, field
from typing import List, Optional

from ..models import QuasistaticError


class ModelError(QuasistaticError):
    """Base exception for problem-definition errors."""
    pass


class NonFiniteEvaluation(ModelError):
    """Raised when a density evaluates to NaN or infinity on the sample set."""
    pass


class InadmissibleProblem(ModelError):
    """Raised when a gating assumption fails: mild convexity mu * C_P^2 < kappa or ellipticity.

    Attributes:
        margin: Margin of the failed check, kappa - mu * C_P^2 for mild convexity (non-positive when raised)
    """

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


@dataclass(frozen=True)
class AssumptionCheck:
    """Outcome of one sampled assumption check."""
    name: str
    passed: bool
    margin: float
    detail: str = ''
    gating: bool = False


@dataclass
class AdmissibilityReport:
    """Pass/fail list for the standing assumptions of a problem."""
    checks: List[AssumptionCheck] = field(default_factory=list)
    kappa: float = 0.0
    mu: float = 0.0
    poincare_constant: Optional[float] = None

    @property
    def convexity_margin(self) -> float:
        """kappa - mu * C_P^2."""
        return self.kappa - self.mu * (self.poincare_constant or 0.0) ** 2

    @property
    def passed(self) -> bool:
        """True iff every gating check passed."""
        return all(check.passed for check in self.checks if check.gating)

    @property
    def failures(self) -> List[AssumptionCheck]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> AssumptionCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def raise_for_status(self) -> None:
        """Raise InadmissibleProblem if a gating check failed."""
        if self.passed:
            return
        failed = [check for check in self.checks if check.gating and not check.passed]
        if any(check.name == 'muCP' for check in failed):
            raise InadmissibleProblem(
                f"mild convexity violated: mu*C_P^2 = {self.mu * (self.poincare_constant or 0.0) ** 2:.6g} "
                f">= kappa = {self.kappa:.6g} (margin {self.convexity_margin:.6g})",
                margin=self.convexity_margin,
            )
        first = failed[0]
        raise InadmissibleProblem(
            f"assumption {first.name} violated: {first.detail} (margin {first.margin:.6g})",
            margin=first.margin,
        )
