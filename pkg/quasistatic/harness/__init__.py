from .errors import error_l2h1, reference_error, sample_times
from .models import ConfigurationError, HarnessError, InsufficientLevels, RateFit, RunConfig, SweepSettings
from .output import ResultWriter
from .problems import (
    ExactSolution,
    builtin_problem,
    double_well_problem,
    exact_problem_1d,
    exact_solution,
    rough_problem_1d,
    zero_problem,
)
from .rates import SweepRunner, fit_rate, self_reference, sweep_and_fit, time_rate_exponent

__all__ = [
    'error_l2h1',
    'reference_error',
    'sample_times',
    'ConfigurationError',
    'HarnessError',
    'InsufficientLevels',
    'RateFit',
    'RunConfig',
    'SweepSettings',
    'ResultWriter',
    'ExactSolution',
    'builtin_problem',
    'double_well_problem',
    'exact_problem_1d',
    'exact_solution',
    'rough_problem_1d',
    'zero_problem',
    'SweepRunner',
    'fit_rate',
    'self_reference',
    'sweep_and_fit',
    'time_rate_exponent',
]
