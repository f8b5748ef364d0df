from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

import numpy as np

from ..models import QuasistaticError


class EstimateError(QuasistaticError):
    """Raised when a verifier is called with unusable input or produces invalid values."""
    pass


@dataclass(frozen=True)
class EstimateRow:
    """One refinement level of an estimate suite."""
    level: int
    h: float
    tau: float
    measured: float
    bound_or_trend: float
    passed: bool

    def __post_init__(self):
        for name in ('measured', 'bound_or_trend'):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise EstimateError(f"{name} must be finite and nonnegative, got {value}")


@dataclass
class EstimateReport:
    """Measured quantities of one suite across refinement levels.

    Attributes:
        suite: Suite name
        rows: One row per level
        passed: Verdict of the suite
        asserted: False for report-only suites, whose verdict never fails a run
        details: Extra per-suite measurements
    """
    suite: str
    rows: List[EstimateRow] = field(default_factory=list)
    passed: bool = True
    asserted: bool = True
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.asserted and not self.passed

    def measured(self) -> np.ndarray:
        return np.array([row.measured for row in self.rows])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': self.suite,
            'passed': self.passed,
            'asserted': self.asserted,
            'rows': [asdict(row) for row in self.rows],
            'details': self.details,
        }
