from .models import EstimateError, EstimateReport, EstimateRow
from .verifiers import (
    coercivity_family,
    holder_family,
    holder_seminorm,
    scalar_holder_seminorm,
    sobolev_family,
    space_family,
    strong_inequality_residual,
    time_derivative_family,
    uniqueness_probe,
    uniqueness_report,
    verify_coercivity,
    verify_discrete_sobolev,
    verify_space_bound,
    verify_time_derivative_bound,
)

__all__ = [
    'EstimateError',
    'EstimateReport',
    'EstimateRow',
    'coercivity_family',
    'holder_family',
    'holder_seminorm',
    'scalar_holder_seminorm',
    'sobolev_family',
    'space_family',
    'strong_inequality_residual',
    'time_derivative_family',
    'uniqueness_probe',
    'uniqueness_report',
    'verify_coercivity',
    'verify_discrete_sobolev',
    'verify_space_bound',
    'verify_time_derivative_bound',
]
