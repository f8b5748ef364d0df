"""
Ritz projection, the discrete elliptic operator L^h and its Green operator G^h,
and prolongation between nested spaces.

Sign convention: <L^h z, phi> = -int grad z : A : grad phi, so -L^h is positive
definite and G^h(L^h z) = L^h(G^h z) = -z.
"""
from typing import Callable

import numpy as np
from scipy import sparse

from ..logger import get_logger
from ..model.data import EllipticTensor
from .linalg import solve_spd
from .models import FemError, NodalField, SpaceMismatch
from .quadrature import gauss_segment
from .space import FemSpace

logger = get_logger(__name__)

EDGE_POINTS = 4


def _facet_means(space: FemSpace, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Mean of g over the facet opposite each cell vertex, shape (nc, d+1, m)."""
    coords = space.mesh.cell_coordinates
    nc, nv = coords.shape[0], coords.shape[1]
    m = space.components
    means = np.zeros((nc, nv, m))
    if space.dimension == 1:
        for a in range(nv):
            opposite = coords[:, 1 - a, :]
            means[:, a] = np.asarray(g(opposite), dtype=float).reshape(nc, m)
        return means

    s, w = gauss_segment(EDGE_POINTS)
    for a in range(nv):
        p, q = [b for b in range(nv) if b != a]
        points = coords[:, p, None, :] + s[None, :, None] * (coords[:, q, None, :] - coords[:, p, None, :])
        values = np.asarray(g(points.reshape(-1, 2)), dtype=float).reshape(nc, s.size, m)
        means[:, a] = np.einsum('s,csi->ci', w, values)
    return means


def ritz_project(space: FemSpace, g: Callable[[np.ndarray], np.ndarray], tensor: EllipticTensor, t: float) -> NodalField:
    """Pi^h_t g: the P1 field with <A_t grad(g - Pi g), grad phi> = 0 for every basis phi.

    The right-hand side integrates by parts per cell, int_K grad g = sum over
    facets of n |F| mean_F(g), so only values of g are needed. With the
    cellwise averaged tensor this makes the projection exact on P1 fields.

    Args:
        space: Target space
        g: Function of points (npts, d) returning (npts, m); zero on the boundary
        tensor: Elliptic tensor
        t: Time at which A is frozen

    Returns:
        The projected field

    Raises:
        LinearSolveFailure: If the stiffness solve fails
    """
    d = space.dimension
    volumes = space.mesh.volumes
    G = space.gradients
    # outward n_a |F_a| = -d |K| grad lambda_a
    normals = -d * volumes[:, None, None] * G
    cell_integral = np.einsum('cad,cai->cid', normals, _facet_means(space, g))

    A = space.cell_tensor(tensor, t)
    local = np.einsum('ciajb,cjb,cka->cki', A, cell_integral, G).reshape(space.mesh.num_cells, -1)
    full = np.zeros(space.mesh.num_vertices * space.components)
    np.add.at(full, space.cell_dofs.ravel(), local.ravel())
    rhs = full[space.interior_dofs]

    stiffness = space.assemble_stiffness(tensor, t)
    values = solve_spd(stiffness.matrix, rhs)
    logger.debug(f"Ritz projection at t={t:.6g} on {space!r}")
    return space.field(values, time=t)


def elliptic_project_initial(space: FemSpace, u0: Callable[[np.ndarray], np.ndarray], tensor: EllipticTensor) -> NodalField:
    """Pi^h_0 u0, the discrete initial datum."""
    return ritz_project(space, u0, tensor, 0.0)


def discrete_operator_L(space: FemSpace, z: NodalField, tensor: EllipticTensor, t: float,
                        mass: str = 'lumped') -> NodalField:
    """xi = L^h_t z, the solution of M xi = -K z.

    The lumped mass is the default, so the solve is a diagonal scaling;
    ``mass='consistent'`` solves with the consistent mass by CG.
    """
    values = space.check(z)
    rhs = -(space.assemble_stiffness(tensor, t) @ values)
    if mass == 'lumped':
        xi = rhs / np.repeat(space.lumped_mass(), space.components)
    elif mass == 'consistent':
        xi = solve_spd(space.assemble_mass().matrix, rhs)
    else:
        raise FemError(f"mass must be 'consistent' or 'lumped', got '{mass}'")
    return space.field(xi, time=t)


def discrete_green_G(space: FemSpace, z: NodalField, tensor: EllipticTensor, t: float,
                     mass: str = 'lumped') -> NodalField:
    """x = G^h_t z, the solution of K x = M z."""
    values = space.check(z)
    rhs = space.mass_operator(mass)(values)
    x = solve_spd(space.assemble_stiffness(tensor, t).matrix, rhs)
    return space.field(x, time=t)


def prolongation_matrix(coarse: FemSpace, fine: FemSpace) -> sparse.csr_matrix:
    """Sparse map from coarse interior coefficients to fine interior coefficients.

    Each fine node takes the barycentric combination of the coarse cell that
    contains it; boundary vertices of the coarse mesh contribute zero. Exact
    when the fine mesh refines the coarse one.
    """
    if coarse.components != fine.components or coarse.dimension != fine.dimension:
        raise SpaceMismatch("prolongation needs spaces of the same shape")
    m = coarse.components
    cells, bary = coarse.mesh.locate(fine.mesh.vertices[fine.interior])
    nodes = coarse.node_of_vertex[coarse.mesh.cells[cells]]
    keep = nodes >= 0
    fine_node = np.broadcast_to(np.arange(fine.num_nodes)[:, None], nodes.shape)[keep]
    coarse_node, weights = nodes[keep], bary[keep]
    rows = (fine_node[:, None] * m + np.arange(m)).ravel()
    cols = (coarse_node[:, None] * m + np.arange(m)).ravel()
    data = np.repeat(weights, m)
    return sparse.coo_matrix((data, (rows, cols)), shape=(fine.num_dofs, coarse.num_dofs)).tocsr()


def prolongate(coarse: FemSpace, values: np.ndarray, fine: FemSpace) -> np.ndarray:
    """Interpolate a coarse P1 field at the interior vertices of a finer mesh."""
    if coarse is fine:
        return np.asarray(values, dtype=float).copy()
    return prolongation_matrix(coarse, fine) @ np.asarray(values, dtype=float)
