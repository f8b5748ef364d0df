"""
P1 finite element space with homogeneous Dirichlet conditions and its
assembled operators.
"""
import uuid
from functools import cached_property
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from ..logger import get_logger
from ..mesh.models import SimplicialMesh
from ..model.data import EllipticTensor, ForceField
from .models import FemError, NodalField, SpaceMismatch, SparseSymmetricOperator
from .quadrature import tensor_rule

logger = get_logger(__name__)


class FemSpace:
    """Vector-valued P1 space on a simplicial mesh, boundary dofs eliminated.

    Interior vertices are numbered in mesh order; the dof of component i at
    interior node a is ``a * components + i``.
    """

    def __init__(self, mesh: SimplicialMesh, components: int = 1):
        if components < 1:
            raise FemError(f"a space needs at least one component, got {components}")
        self.mesh = mesh
        self.components = components
        self.uid = uuid.uuid4().hex[:12]
        self.quadrature = tensor_rule(mesh.dimension)

        self.interior = np.flatnonzero(~mesh.boundary)
        if self.interior.size == 0:
            raise FemError("mesh has no interior vertices")
        self.node_of_vertex = np.full(mesh.num_vertices, -1, dtype=np.int64)
        self.node_of_vertex[self.interior] = np.arange(self.interior.size)
        self.interior_dofs = (self.interior[:, None] * components + np.arange(components)).ravel()

        self._stiffness_cache: Dict[Tuple[int, Optional[float]], Tuple[EllipticTensor, SparseSymmetricOperator]] = {}

    def __repr__(self) -> str:
        return f"FemSpace(d={self.dimension}, m={self.components}, nodes={self.num_nodes}, h={self.mesh.h:.4g})"

    @property
    def dimension(self) -> int:
        return self.mesh.dimension

    @property
    def num_nodes(self) -> int:
        return self.interior.size

    @property
    def num_dofs(self) -> int:
        return self.num_nodes * self.components

    def field(self, values: np.ndarray, time: Optional[float] = None) -> NodalField:
        values = np.asarray(values, dtype=float).ravel()
        if values.size != self.num_dofs:
            raise SpaceMismatch(f"expected {self.num_dofs} coefficients, got {values.size}")
        return NodalField(values=values, space_id=self.uid, time=time)

    def zeros(self, time: Optional[float] = None) -> NodalField:
        return self.field(np.zeros(self.num_dofs), time=time)

    def check(self, field: NodalField) -> np.ndarray:
        """Return the coefficients of a field after checking it belongs here."""
        if field.space_id != self.uid:
            raise SpaceMismatch(f"field belongs to space {field.space_id}, not {self.uid}")
        return field.values

    @cached_property
    def gradients(self) -> np.ndarray:
        """Gradients of the barycentric coordinates, shape (nc, d+1, d)."""
        coords = self.mesh.cell_coordinates
        jacobian = coords[:, 1:, :] - coords[:, :1, :]
        inverse_t = np.swapaxes(np.linalg.inv(jacobian), 1, 2)
        first = -inverse_t.sum(axis=1, keepdims=True)
        return np.concatenate([first, inverse_t], axis=1)

    @cached_property
    def cell_dofs(self) -> np.ndarray:
        """Full (boundary included) dof numbers per cell, shape (nc, (d+1) m)."""
        m = self.components
        return (self.mesh.cells[:, :, None] * m + np.arange(m)).reshape(self.mesh.num_cells, -1)

    def _assemble_full(self, local: np.ndarray) -> sparse.csr_matrix:
        dofs = self.cell_dofs
        k = dofs.shape[1]
        rows = np.repeat(dofs, k, axis=1).ravel()
        cols = np.tile(dofs, (1, k)).ravel()
        size = self.mesh.num_vertices * self.components
        return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(size, size)).tocsr()

    def _restrict(self, matrix: sparse.csr_matrix) -> sparse.csr_matrix:
        return matrix[self.interior_dofs][:, self.interior_dofs].tocsr()

    def cell_tensor(self, tensor: EllipticTensor, t: float) -> np.ndarray:
        """A(t, .) averaged over the cell quadrature points, shape (nc, m, d, m, d)."""
        if tensor.components != self.components or tensor.dimension != self.dimension:
            raise SpaceMismatch("tensor shape does not match the space")
        rule = self.quadrature
        points = np.einsum('qa,cad->cqd', rule.barycentric, self.mesh.cell_coordinates)
        values = np.asarray(tensor.evaluate(t, points.reshape(-1, self.dimension)), dtype=float)
        nq = rule.weights.size
        values = values.reshape((self.mesh.num_cells, nq) + values.shape[1:])
        return np.einsum('q,cq...->c...', rule.weights, values)

    def assemble_stiffness(self, tensor: EllipticTensor, t: float) -> SparseSymmetricOperator:
        """Interior stiffness (K v).w = sum_K |K| grad v : A_K : grad w.

        Constant tensors (zero Lipschitz constant) are assembled once and reused.
        """
        key = (id(tensor), None if tensor.lipschitz == 0 else float(t))
        cached = self._stiffness_cache.get(key)
        if cached is not None and cached[0] is tensor:
            return cached[1]

        A = self.cell_tensor(tensor, t)
        G = self.gradients
        local = np.einsum('ciajb,cka,clb->ckilj', A, G, G) * self.mesh.volumes[:, None, None, None, None]
        size = G.shape[1] * self.components
        local = local.reshape(-1, size, size)
        local = 0.5 * (local + np.swapaxes(local, 1, 2))

        operator = SparseSymmetricOperator(matrix=self._restrict(self._assemble_full(local)), time=float(t))
        self._stiffness_cache[key] = (tensor, operator)
        logger.debug(f"Assembled stiffness at t={t:.6g}: {operator.dimension} dofs, nnz={operator.matrix.nnz}")
        return operator

    @cached_property
    def _mass_full(self) -> sparse.csr_matrix:
        d = self.dimension
        local = (np.eye(d + 1) + 1.0) / ((d + 1) * (d + 2))
        local = np.kron(local, np.eye(self.components))
        return self._assemble_full(self.mesh.volumes[:, None, None] * local)

    @cached_property
    def _mass_interior(self) -> sparse.csr_matrix:
        return self._restrict(self._mass_full)

    def assemble_mass(self) -> SparseSymmetricOperator:
        """Consistent P1 mass matrix on the interior dofs."""
        return SparseSymmetricOperator(matrix=self._mass_interior)

    @cached_property
    def _load_matrix(self) -> sparse.csr_matrix:
        return self._mass_full[self.interior_dofs].tocsr()

    @cached_property
    def _lumped(self) -> np.ndarray:
        full = np.asarray(self._mass_full.sum(axis=1)).ravel()
        return full[self.interior_dofs][::self.components].copy()

    def lumped_mass(self) -> np.ndarray:
        """Row-sum weights w_a = int phi_a > 0, one per interior node."""
        return self._lumped.copy()

    def mass_operator(self, mass: str = 'consistent') -> Callable[[np.ndarray], np.ndarray]:
        if mass == 'consistent':
            return lambda v: self._mass_interior @ v
        if mass == 'lumped':
            weights = np.repeat(self._lumped, self.components)
            return lambda v: weights * v
        raise FemError(f"mass must be 'consistent' or 'lumped', got '{mass}'")

    def vertex_values(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Evaluate func at every mesh vertex, shape (nv, m)."""
        values = np.asarray(func(self.mesh.vertices), dtype=float)
        return values.reshape(self.mesh.num_vertices, self.components)

    def load(self, force: ForceField, t: float) -> np.ndarray:
        """b = M f(t, .)-interpolant, tested against the interior basis."""
        if force.components != self.components:
            raise SpaceMismatch("force shape does not match the space")
        values = self.vertex_values(lambda x: force.evaluate(t, x)).ravel()
        return self._load_matrix @ values

    def force_l2(self, force: ForceField, t: float, derivative: bool = False) -> float:
        """L2 norm of the P1 interpolant of f(t) (or of its time derivative) over the whole domain."""
        func = force.derivative if derivative else force.evaluate
        if func is None:
            raise FemError(f"force '{force.name}' has no analytic time derivative")
        values = self.vertex_values(lambda x: func(t, x)).ravel()
        return float(np.sqrt(max(values @ (self._mass_full @ values), 0.0)))

    def interpolate(self, func: Callable[[np.ndarray], np.ndarray], time: Optional[float] = None) -> NodalField:
        """Nodal interpolant; boundary values of func are dropped."""
        values = self.vertex_values(func)
        return self.field(values[self.interior].ravel(), time=time)

    def extend(self, values: np.ndarray) -> np.ndarray:
        """Interior coefficients to vertex values (nv, m), zero on the boundary."""
        values = np.asarray(values, dtype=float).ravel()
        if values.size != self.num_dofs:
            raise SpaceMismatch(f"expected {self.num_dofs} coefficients, got {values.size}")
        full = np.zeros((self.mesh.num_vertices, self.components))
        full[self.interior] = values.reshape(-1, self.components)
        return full

    def cell_gradients(self, values: np.ndarray) -> np.ndarray:
        """Cellwise constant gradients, shape (nc, m, d)."""
        full = self.extend(values)
        return np.einsum('cai,cad->cid', full[self.mesh.cells], self.gradients)

    def evaluate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Point values of the P1 field, shape (npts, m)."""
        full = self.extend(values)
        cells, bary = self.mesh.locate(points)
        return np.einsum('pa,pai->pi', bary, full[self.mesh.cells[cells]])

    @cached_property
    def _scalar_operators(self) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
        scalar = FemSpace(self.mesh, components=1)
        G = scalar.gradients
        local = np.einsum('cad,cbd->cab', G, G) * self.mesh.volumes[:, None, None]
        stiffness = scalar._restrict(scalar._assemble_full(local))
        return stiffness, scalar._mass_interior

    def scalar_operators(self) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
        """Unit-tensor stiffness and consistent mass of the scalar space on the same mesh."""
        return self._scalar_operators
