"""
The incremental functional of one time step,

    F(v) = sum_i w_i R1(v_i - u_prev_i) + 1/2 v.K v + sum_i w_i W0(v_i) - b.v,

split into the nodewise nonsmooth dissipation and the smooth remainder g.
"""
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..fem.space import FemSpace
from ..model.data import ProblemSpec
from ..model.potentials import DissipationPotential, EnergyDensity
from .models import IncrementError


@dataclass
class IncrementProblem:
    """Assembled data of one step.

    Attributes:
        stiffness: K_k on the interior dofs
        weights: Lumped mass weight per node
        load: b_k
        u_prev: Previous coefficients
        dissipation: R1
        energy: W0
        components: m
    """
    stiffness: sparse.spmatrix
    weights: np.ndarray
    load: np.ndarray
    u_prev: np.ndarray
    dissipation: DissipationPotential
    energy: EnergyDensity
    components: int = 1

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        self.load = np.asarray(self.load, dtype=float).ravel()
        self.u_prev = np.asarray(self.u_prev, dtype=float).ravel()
        size = self.weights.size * self.components
        if self.load.size != size or self.u_prev.size != size or self.stiffness.shape != (size, size):
            raise IncrementError("stiffness, weights, load and u_prev disagree in size")
        if np.any(self.weights <= 0):
            raise IncrementError("lumped weights must be positive")

    @property
    def size(self) -> int:
        return self.u_prev.size

    def nodes(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v, dtype=float).reshape(-1, self.components)

    @property
    def load_scale(self) -> float:
        """max(1, ||W^-1 b||_inf): the reference size of the load density."""
        density = np.linalg.norm(self.nodes(self.load), axis=1) / self.weights
        return max(1.0, float(density.max(initial=0.0)))

    def dissipation_value(self, v: np.ndarray) -> float:
        return float(self.weights @ self.dissipation.evaluate(self.nodes(v - self.u_prev)))

    def smooth_value(self, v: np.ndarray) -> float:
        return float(0.5 * v @ (self.stiffness @ v) + self.weights @ self.energy.value(self.nodes(v)) - self.load @ v)

    def smooth_gradient(self, v: np.ndarray) -> np.ndarray:
        potential = self.weights[:, None] * self.energy.gradient(self.nodes(v))
        return self.stiffness @ v + potential.ravel() - self.load

    def objective(self, v: np.ndarray) -> float:
        return self.dissipation_value(v) + self.smooth_value(v)

    def prox(self, y: np.ndarray, gamma: float) -> np.ndarray:
        """Nodewise shifted prox: v_i = u_prev_i + prox_{gamma w_i R1}(y_i - u_prev_i)."""
        shifted = self.nodes(y - self.u_prev)
        return self.u_prev + self.dissipation.prox(shifted, gamma * self.weights).ravel()

    def prox_residual(self, x_new: np.ndarray, y: np.ndarray, gamma: float) -> float:
        """max_i |x_new_i - y_i| / (gamma w_i), relative to the load scale."""
        step = np.linalg.norm(self.nodes(x_new - y), axis=1) / (gamma * self.weights)
        return float(step.max(initial=0.0)) / self.load_scale

    def el_violation(self, v: np.ndarray) -> float:
        """Worst normalized violation of the discrete Euler-Lagrange inequality.

        With delta = v - u_prev the inequality reads
        R(xi) - R(delta) + <grad g(v), xi - delta> >= 0, tested on
        xi in {0, 2 delta, delta +- eps e_i} with eps = max(|delta|_inf, 1e-3).
        """
        v = np.asarray(v, dtype=float).ravel()
        delta = v - self.u_prev
        gradient = self.smooth_gradient(v)
        R = self.dissipation.evaluate
        node_delta = self.nodes(delta)
        node_R = self.weights * R(node_delta)
        total = float(node_R.sum())

        def violation(R_xi: np.ndarray, pairing: np.ndarray) -> np.ndarray:
            gap = total - R_xi - pairing
            scale = 1.0 + np.maximum.reduce([np.full_like(R_xi, abs(total)), np.abs(R_xi), np.abs(pairing)])
            return np.maximum(gap, 0.0) / scale

        # xi = 0 and xi = 2 delta
        pairing = float(gradient @ delta)
        worst = violation(np.array([0.0, 2.0 * total]), np.array([-pairing, pairing])).max()

        eps = max(float(np.max(np.abs(delta), initial=0.0)), 1e-3)
        m = self.components
        for sign in (1.0, -1.0):
            for component in range(m):
                shifted = node_delta.copy()
                shifted[:, component] += sign * eps
                R_xi = total - node_R + self.weights * R(shifted)
                pairing = sign * eps * gradient[component::m]
                worst = max(worst, float(violation(R_xi, pairing).max(initial=0.0)))
        return float(worst)


def build_increment(space: FemSpace, u_prev: np.ndarray, t: float, spec: ProblemSpec) -> IncrementProblem:
    """Assemble K_k, the lumped weights and b_k = M f(t_k) for one step."""
    return IncrementProblem(
        stiffness=space.assemble_stiffness(spec.tensor, t).matrix,
        weights=space.lumped_mass(),
        load=space.load(spec.force, t),
        u_prev=np.asarray(u_prev, dtype=float).ravel(),
        dissipation=spec.dissipation,
        energy=spec.energy,
        components=space.components,
    )
