from .builder import refine, refinement_family, save_mesh, structured_mesh, unit_interval, unit_square
from .models import EigenSolveFailure, MeshError, SimplicialMesh
from .poincare import gating_poincare_constant, poincare_constant, smallest_eigenpair

__all__ = [
    'refine',
    'refinement_family',
    'save_mesh',
    'structured_mesh',
    'unit_interval',
    'unit_square',
    'EigenSolveFailure',
    'MeshError',
    'SimplicialMesh',
    'gating_poincare_constant',
    'poincare_constant',
    'smallest_eigenpair',
]
