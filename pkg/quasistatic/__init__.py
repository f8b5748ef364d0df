from quasistatic.fem import FemSpace, NodalField
from quasistatic.harness import ResultWriter, RunConfig, sweep_and_fit
from quasistatic.increment import StepOptions, minimize_increment
from quasistatic.manager import ExperimentManager
from quasistatic.mesh import SimplicialMesh, structured_mesh
from quasistatic.model import ProblemSpec, check_admissibility, load_problem
from quasistatic.models import QuasistaticError, SolutionMode, Suite
from quasistatic.rothe import RotheScheme, Trajectory

__all__ = [
    'FemSpace',
    'NodalField',
    'ResultWriter',
    'RunConfig',
    'sweep_and_fit',
    'StepOptions',
    'minimize_increment',
    'ExperimentManager',
    'SimplicialMesh',
    'structured_mesh',
    'ProblemSpec',
    'check_admissibility',
    'load_problem',
    'QuasistaticError',
    'SolutionMode',
    'Suite',
    'RotheScheme',
    'Trajectory',
]
