from .models import InitialInstability, InitialStability, RotheError, Trajectory
from .scheme import RotheScheme, run
from .storage import default_checkpoints, save_trajectory, write_checkpoint

__all__ = [
    'InitialInstability',
    'InitialStability',
    'RotheError',
    'Trajectory',
    'RotheScheme',
    'run',
    'default_checkpoints',
    'save_trajectory',
    'write_checkpoint',
]
