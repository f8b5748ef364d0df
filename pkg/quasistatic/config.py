"""
Configuration management for the quasistatic solver and verification harness.
"""
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _env_flag(name: str, default: str = 'false') -> bool:
    return os.getenv(name, default).strip().lower() in ('1', 'true', 'yes', 'on')


@dataclass
class SolverConfig:
    """Numerical tolerances and iteration budgets shared by all solvers."""
    cg_rtol: float = 1e-12
    cg_maxiter_factor: int = 20
    eigen_tol: float = 1e-10
    eigen_maxiter: int = 500
    step_tol: float = 1e-10
    step_maxiter: int = 100_000


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = 'INFO'
    to_file: bool = False


@dataclass
class Config:
    """Main application configuration."""
    # Application paths
    base_dir: Path
    logs_dir: Path
    output_dir: Path

    # Component configurations
    solver: SolverConfig = field(default_factory=SolverConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def load(cls) -> 'Config':
        """Load configuration from environment variables."""
        base_dir = Path(__file__).parent.parent

        return cls(
            base_dir=base_dir,
            logs_dir=Path(os.getenv('QS_LOGS_DIR', str(base_dir / 'logs'))),
            output_dir=Path(os.getenv('QS_OUTPUT_DIR', str(base_dir / 'results'))),

            solver=SolverConfig(
                cg_rtol=float(os.getenv('QS_CG_RTOL', '1e-12')),
                cg_maxiter_factor=int(os.getenv('QS_CG_MAXITER_FACTOR', '20')),
                eigen_tol=float(os.getenv('QS_EIGEN_TOL', '1e-10')),
                eigen_maxiter=int(os.getenv('QS_EIGEN_MAXITER', '500')),
                step_tol=float(os.getenv('QS_STEP_TOL', '1e-10')),
                step_maxiter=int(os.getenv('QS_STEP_MAXITER', '100000')),
            ),

            logging=LoggingConfig(
                level=os.getenv('LOG_LEVEL', 'INFO').upper(),
                to_file=_env_flag('QS_LOG_TO_FILE'),
            ),
        )


def load_document(path: Path) -> Dict[str, Any]:
    """Read a run or problem document.

    JSON documents are parsed by the YAML loader as well, so either format works.

    Args:
        path: Location of the document

    Returns:
        The parsed mapping

    Raises:
        ConfigurationError: If the file is missing or does not hold a mapping
    """
    from quasistatic.harness.models import ConfigurationError

    path = Path(path)
    try:
        with open(path, 'r') as f:
            document: Optional[Any] = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigurationError(f"Configuration file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Could not parse {path}: {e}") from e

    if not isinstance(document, dict):
        raise ConfigurationError(f"{path} must contain a mapping at top level")
    return document


# Global configuration instance
config = Config.load()
