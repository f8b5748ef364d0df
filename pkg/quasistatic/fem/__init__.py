from .linalg import dump_triplets, solve_spd
from .models import (
    FemError,
    LinearSolveFailure,
    NodalField,
    SpaceMismatch,
    SparseSymmetricOperator,
    UnsupportedExponent,
)
from .norms import error_norms, gradient_lp, h1_semi, l2, lp
from .operators import (
    discrete_green_G,
    discrete_operator_L,
    elliptic_project_initial,
    prolongate,
    prolongation_matrix,
    ritz_project,
)
from .space import FemSpace

__all__ = [
    'dump_triplets',
    'solve_spd',
    'FemError',
    'LinearSolveFailure',
    'NodalField',
    'SpaceMismatch',
    'SparseSymmetricOperator',
    'UnsupportedExponent',
    'error_norms',
    'gradient_lp',
    'h1_semi',
    'l2',
    'lp',
    'discrete_green_G',
    'discrete_operator_L',
    'elliptic_project_initial',
    'prolongate',
    'prolongation_matrix',
    'ritz_project',
    'FemSpace',
]
