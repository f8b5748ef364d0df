from .models import BranchExit, OutOfDomain, ScalarTrajectory, ZeroDimError
from .oracle import (
    energy_balance_defects,
    energy_balance_residual,
    exact_solution,
    scalar_pde_reference,
    simulate,
    stability_check,
    step_global,
    step_local,
    time_error_l1,
)

__all__ = [
    'BranchExit',
    'OutOfDomain',
    'ScalarTrajectory',
    'ZeroDimError',
    'energy_balance_defects',
    'energy_balance_residual',
    'exact_solution',
    'scalar_pde_reference',
    'simulate',
    'stability_check',
    'step_global',
    'step_local',
    'time_error_l1',
]
