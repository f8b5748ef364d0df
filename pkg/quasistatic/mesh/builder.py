"""
Structured meshes of the unit interval and unit square and their uniform refinement.
"""
import json
from pathlib import Path
from typing import List

import numpy as np

from ..logger import get_logger
from .models import MeshError, SimplicialMesh

logger = get_logger(__name__)


def _on_unit_boundary(vertices: np.ndarray) -> np.ndarray:
    return np.any(np.isclose(vertices, 0.0) | np.isclose(vertices, 1.0), axis=1)


def unit_interval(n: int) -> SimplicialMesh:
    """Uniform mesh of [0, 1] with n cells, h = 1/n."""
    if n < 2:
        raise MeshError(f"unit_interval needs n >= 2, got {n}")
    vertices = np.linspace(0.0, 1.0, n + 1)[:, None]
    cells = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    return SimplicialMesh(vertices=vertices, cells=cells, boundary=_on_unit_boundary(vertices))


def unit_square(n: int) -> SimplicialMesh:
    """Right-diagonal triangulation of [0, 1]^2: n^2 squares, each cut along its rising diagonal.

    h = sqrt(2)/n and every triangle is congruent, so rho = 1.
    """
    if n < 2:
        raise MeshError(f"unit_square needs n >= 2, got {n}")
    ticks = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(ticks, ticks)
    vertices = np.stack([xx.ravel(), yy.ravel()], axis=1)

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    cells = np.concatenate([
        np.stack([v00, v10, v11], axis=1),
        np.stack([v00, v11, v01], axis=1),
    ])
    return SimplicialMesh(vertices=vertices, cells=cells, boundary=_on_unit_boundary(vertices))


def _refine_interval(mesh: SimplicialMesh) -> SimplicialMesh:
    nv = mesh.num_vertices
    midpoints = mesh.centroids
    mid = nv + np.arange(mesh.num_cells)
    a, b = mesh.cells[:, 0], mesh.cells[:, 1]
    cells = np.concatenate([np.stack([a, mid], axis=1), np.stack([mid, b], axis=1)])
    vertices = np.concatenate([mesh.vertices, midpoints])
    boundary = np.concatenate([mesh.boundary, np.zeros(mesh.num_cells, dtype=bool)])
    return SimplicialMesh(vertices=vertices, cells=cells, boundary=boundary)


def _refine_triangles(mesh: SimplicialMesh) -> SimplicialMesh:
    nv = mesh.num_vertices
    a, b, c = mesh.cells.T
    # local edges (a, b), (b, c), (c, a)
    local = np.stack([np.stack([a, b], 1), np.stack([b, c], 1), np.stack([c, a], 1)], axis=1)
    edges, inverse, counts = np.unique(
        np.sort(local.reshape(-1, 2), axis=1), axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.reshape(-1, 3) + nv
    m_ab, m_bc, m_ca = inverse.T

    midpoints = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    vertices = np.concatenate([mesh.vertices, midpoints])
    # a midpoint lies on the boundary iff its edge belongs to a single cell
    boundary = np.concatenate([mesh.boundary, counts == 1])
    cells = np.concatenate([
        np.stack([a, m_ab, m_ca], axis=1),
        np.stack([m_ab, b, m_bc], axis=1),
        np.stack([m_ca, m_bc, c], axis=1),
        np.stack([m_ab, m_bc, m_ca], axis=1),
    ])
    return SimplicialMesh(vertices=vertices, cells=cells, boundary=boundary)


def refine(mesh: SimplicialMesh) -> SimplicialMesh:
    """Uniform refinement halving h: bisection in 1-D, red refinement in 2-D.

    The old vertices keep their indices, so the coarse vertex set is a prefix
    of the fine one.
    """
    if mesh.dimension == 1:
        fine = _refine_interval(mesh)
    else:
        fine = _refine_triangles(mesh)
    logger.debug(f"Refined mesh: {mesh.num_cells} -> {fine.num_cells} cells, h = {fine.h:.4g}")
    return fine


def refinement_family(base: SimplicialMesh, levels: int) -> List[SimplicialMesh]:
    """The base mesh followed by ``levels - 1`` successive uniform refinements."""
    if levels < 1:
        raise MeshError(f"a refinement family needs at least one level, got {levels}")
    family = [base]
    for _ in range(levels - 1):
        family.append(refine(family[-1]))
    return family


def structured_mesh(dimension: int, n: int) -> SimplicialMesh:
    """unit_interval(n) for d = 1, unit_square(n) for d = 2."""
    if dimension == 1:
        return unit_interval(n)
    if dimension == 2:
        return unit_square(n)
    raise MeshError(f"only d in {{1, 2}} is supported, got d={dimension}")


def save_mesh(mesh: SimplicialMesh, path: Path) -> Path:
    """Write the mesh as a JSON document {vertices, cells, boundary}."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(mesh.to_dict(), f)
    logger.info(f"Saved mesh with {mesh.num_vertices} vertices to {path}")
    return path
