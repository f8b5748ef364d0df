from .functional import IncrementProblem, build_increment
from .models import IncrementError, NoConvergence, NonConvexTotal, StepCertificate, StepOptions
from .solver import IncrementSolver, el_residual, largest_eigenvalue, minimize_increment

__all__ = [
    'IncrementProblem',
    'build_increment',
    'IncrementError',
    'NoConvergence',
    'NonConvexTotal',
    'StepCertificate',
    'StepOptions',
    'IncrementSolver',
    'el_residual',
    'largest_eigenvalue',
    'minimize_increment',
]
