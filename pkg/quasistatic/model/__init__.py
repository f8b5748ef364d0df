from .admissibility import check_admissibility
from .data import (
    EllipticTensor,
    ForceField,
    ProblemSpec,
    identity_tensor,
    oscillating_force,
    oscillating_tensor,
    power_force,
    ramp_force,
    sine_bump_initial,
    zero_force,
    zero_initial,
)
from .loader import load_problem, problem_from_dict
from .models import (
    AdmissibilityReport,
    AssumptionCheck,
    InadmissibleProblem,
    ModelError,
    NonFiniteEvaluation,
)
from .potentials import (
    DissipationPotential,
    EnergyDensity,
    builtin_abs_dissipation,
    builtin_double_well,
    builtin_weighted_l1,
    power_energy,
    quadratic_energy,
    shifted_power_energy,
)

__all__ = [
    'check_admissibility',
    'EllipticTensor',
    'ForceField',
    'ProblemSpec',
    'identity_tensor',
    'oscillating_force',
    'oscillating_tensor',
    'power_force',
    'ramp_force',
    'sine_bump_initial',
    'zero_force',
    'zero_initial',
    'load_problem',
    'problem_from_dict',
    'AdmissibilityReport',
    'AssumptionCheck',
    'InadmissibleProblem',
    'ModelError',
    'NonFiniteEvaluation',
    'DissipationPotential',
    'EnergyDensity',
    'builtin_abs_dissipation',
    'builtin_double_well',
    'builtin_weighted_l1',
    'power_energy',
    'quadratic_energy',
    'shifted_power_energy',
]
