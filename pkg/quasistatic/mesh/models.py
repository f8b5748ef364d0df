from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..models import QuasistaticError

LOCATE_TOLERANCE = 1e-12
LOCATE_CANDIDATES = 8


class MeshError(QuasistaticError):
    """Base exception for mesh construction and queries."""
    pass


class EigenSolveFailure(MeshError):
    """Raised when the inverse iteration for the smallest eigenpair does not converge."""
    pass


@dataclass(frozen=True, eq=False)
class SimplicialMesh:
    """Conforming simplicial mesh of the unit interval or the unit square.

    Attributes:
        vertices: Coordinates, shape (nv, d)
        cells: Vertex indices per cell, shape (nc, d+1)
        boundary: Boolean flag per vertex, True on the domain boundary
    """
    vertices: np.ndarray
    cells: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        cells = np.asarray(self.cells, dtype=np.int64)
        boundary = np.asarray(self.boundary, dtype=bool)
        if vertices.ndim != 2 or vertices.shape[1] not in (1, 2):
            raise MeshError(f"vertices must have shape (nv, d) with d in {{1, 2}}, got {vertices.shape}")
        if cells.ndim != 2 or cells.shape[1] != vertices.shape[1] + 1:
            raise MeshError(f"cells must have d+1 = {vertices.shape[1] + 1} vertices each")
        if boundary.shape != (vertices.shape[0],):
            raise MeshError("boundary flags must have one entry per vertex")
        if cells.size and (cells.min() < 0 or cells.max() >= vertices.shape[0]):
            raise MeshError("cell references a vertex that does not exist")
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'cells', cells)
        object.__setattr__(self, 'boundary', boundary)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_cells(self) -> int:
        return self.cells.shape[0]

    @cached_property
    def cell_coordinates(self) -> np.ndarray:
        """Vertex coordinates per cell, shape (nc, d+1, d)."""
        return self.vertices[self.cells]

    @cached_property
    def volumes(self) -> np.ndarray:
        """Length (d=1) or area (d=2) of every cell."""
        coords = self.cell_coordinates
        edges = coords[:, 1:, :] - coords[:, :1, :]
        if self.dimension == 1:
            return np.abs(edges[:, 0, 0])
        return 0.5 * np.abs(np.linalg.det(edges))

    @cached_property
    def cell_diameters(self) -> np.ndarray:
        """Longest edge of every cell."""
        coords = self.cell_coordinates
        lengths = [np.linalg.norm(coords[:, a] - coords[:, b], axis=1)
                   for a, b in combinations(range(self.dimension + 1), 2)]
        return np.max(np.stack(lengths, axis=1), axis=1)

    @property
    def h(self) -> float:
        """Mesh size, the largest cell diameter."""
        return float(self.cell_diameters.max())

    @property
    def quasiuniformity(self) -> float:
        """rho = max h_K / min h_K."""
        return float(self.cell_diameters.max() / self.cell_diameters.min())

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.cell_coordinates.mean(axis=1)

    @cached_property
    def _centroid_tree(self) -> cKDTree:
        return cKDTree(self.centroids)

    def barycentric(self, cells: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Barycentric coordinates of ``points[i]`` with respect to ``cells[i]``."""
        coords = self.cell_coordinates[cells]
        base = coords[:, 0, :]
        edges = np.swapaxes(coords[:, 1:, :] - base[:, None, :], 1, 2)
        local = np.linalg.solve(edges, (points - base)[..., None])[..., 0]
        return np.concatenate([1.0 - local.sum(axis=1, keepdims=True), local], axis=1)

    def locate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Find a containing cell and barycentric coordinates for each point.

        Candidates come from a KD-tree over cell centroids; points the nearest
        candidates miss fall back to a scan over all cells.

        Args:
            points: Array of shape (npts, d)

        Returns:
            Tuple of (cell index per point, barycentric coordinates (npts, d+1))

        Raises:
            MeshError: If a point lies outside the mesh
        """
        points = np.asarray(points, dtype=float).reshape(-1, self.dimension)
        k = min(LOCATE_CANDIDATES, self.num_cells)
        _, candidates = self._centroid_tree.query(points, k=k)
        candidates = np.asarray(candidates).reshape(points.shape[0], k)

        found = np.full(points.shape[0], -1, dtype=np.int64)
        coords = np.zeros((points.shape[0], self.dimension + 1))
        for j in range(k):
            pending = found < 0
            if not pending.any():
                break
            cells = candidates[pending, j]
            lam = self.barycentric(cells, points[pending])
            inside = np.all(lam >= -LOCATE_TOLERANCE, axis=1)
            index = np.flatnonzero(pending)[inside]
            found[index] = cells[inside]
            coords[index] = lam[inside]

        for i in np.flatnonzero(found < 0):
            lam = self.barycentric(np.arange(self.num_cells), np.repeat(points[i:i + 1], self.num_cells, axis=0))
            hits = np.flatnonzero(np.all(lam >= -LOCATE_TOLERANCE, axis=1))
            if hits.size == 0:
                raise MeshError(f"point {points[i].tolist()} lies outside the mesh")
            found[i] = hits[0]
            coords[i] = lam[hits[0]]

        return found, coords

    def to_dict(self) -> dict:
        """JSON-friendly export {vertices, cells, boundary}."""
        return {
            'vertices': self.vertices.tolist(),
            'cells': self.cells.tolist(),
            'boundary': np.flatnonzero(self.boundary).tolist(),
        }
