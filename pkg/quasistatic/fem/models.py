from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse

from ..models import QuasistaticError


class FemError(QuasistaticError):
    """Base exception for the finite element layer."""
    pass


class LinearSolveFailure(FemError):
    """Raised when conjugate gradients misses its tolerance within the iteration budget."""
    pass


class UnsupportedExponent(FemError):
    """Raised for an L^p norm with p outside the supported set."""
    pass


class SpaceMismatch(FemError):
    """Raised when a field is used with a space it does not belong to."""
    pass


@dataclass(frozen=True, eq=False)
class NodalField:
    """Coefficient vector of a P1 field on the interior nodes of a space.

    Entries are ordered node-major: entry ``node * m + component``.
    """
    values: np.ndarray
    space_id: str
    time: Optional[float] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise FemError("nodal field has non-finite entries")
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return self.values.size

    def nodes(self, components: int) -> np.ndarray:
        """Values reshaped to (num_nodes, components)."""
        return self.values.reshape(-1, components)


@dataclass(frozen=True, eq=False)
class SparseSymmetricOperator:
    """Assembled symmetric sparse matrix with the time it was assembled at."""
    matrix: sparse.csr_matrix
    time: Optional[float] = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: np.ndarray) -> np.ndarray:
        return self.matrix @ other

    def quadratic_form(self, v: np.ndarray) -> float:
        return float(v @ (self.matrix @ v))

    def dump(self, path: Path) -> Path:
        """Write the coordinate triplets ``i j value``, one per line."""
        from .linalg import dump_triplets
        return dump_triplets(self.matrix, path)
