import logging
import tempfile
import unittest
from pathlib import Path

import numpy as np
from scipy import sparse

from ..fem import (
    FemSpace,
    LinearSolveFailure,
    SpaceMismatch,
    UnsupportedExponent,
    discrete_green_G,
    discrete_operator_L,
    dump_triplets,
    error_norms,
    h1_semi,
    l2,
    lp,
    prolongate,
    ritz_project,
    solve_spd,
)
from ..fem.quadrature import simplex_rule
from ..mesh import refine, unit_interval, unit_square
from ..model import identity_tensor, ramp_force

logging.getLogger('quasistatic').setLevel(logging.WARNING)


def _sine(x):
    return np.sin(np.pi * x[:, :1])


def _sine_gradient(x):
    return (np.pi * np.cos(np.pi * x[:, :1]))[:, :, None]


class TestAssembly(unittest.TestCase):
    """Test cases for stiffness, mass and load assembly"""

    def setUp(self):
        """Set up a scalar space on four cells"""
        self.space = FemSpace(unit_interval(4))
        self.tensor = identity_tensor()

    def test_stiffness_entries(self):
        """Test the 1-D stiffness is tridiag(-1, 2, -1) / h"""
        K = self.space.assemble_stiffness(self.tensor, 0.0).matrix.toarray()
        expected = 4.0 * (2.0 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1))
        np.testing.assert_allclose(K, expected)

    def test_stiffness_is_symmetric_positive_definite(self):
        """Test symmetry and positivity of the 2-D vector stiffness"""
        space = FemSpace(unit_square(4), components=2)
        K = space.assemble_stiffness(identity_tensor(components=2, dimension=2), 0.0).matrix
        self.assertLessEqual(abs(K - K.T).max(), 1e-14)
        self.assertGreater(np.linalg.eigvalsh(K.toarray()).min(), 0.0)

    def test_lumped_mass_and_load(self):
        """Test the lumped weights and that a constant force loads them"""
        weights = self.space.lumped_mass()
        np.testing.assert_allclose(weights, np.full(3, 0.25))
        load = self.space.load(ramp_force(slope=0.0, offset=1.0), 0.0)
        np.testing.assert_allclose(load, weights)

    def test_lumped_mass_is_per_node(self):
        """Test a vector space keeps one weight per node"""
        space = FemSpace(unit_square(4), components=2)
        self.assertEqual(space.lumped_mass().size, space.num_nodes)
        self.assertEqual(space.num_dofs, 2 * space.num_nodes)

    def test_field_from_other_space_is_rejected(self):
        """Test that fields remember the space they belong to"""
        other = FemSpace(unit_interval(4))
        with self.assertRaises(SpaceMismatch):
            self.space.check(other.zeros())
        with self.assertRaises(SpaceMismatch):
            self.space.field(np.zeros(5))


class TestQuadrature(unittest.TestCase):
    """Test cases for the simplex quadrature"""

    def test_triangle_rule_integrates_cubic(self):
        """Test int_T x^2 y = 1/60 on the reference triangle"""
        rule = simplex_rule(2, 4)
        x, y = rule.barycentric[:, 1], rule.barycentric[:, 2]
        self.assertAlmostEqual(float(np.sum(rule.weights * x ** 2 * y)) * 0.5, 1.0 / 60.0, places=14)
        self.assertAlmostEqual(float(rule.weights.sum()), 1.0, places=14)

    def test_segment_rule_integrates_polynomials(self):
        """Test int_0^1 x^5 = 1/6"""
        rule = simplex_rule(1, 5)
        x = rule.barycentric[:, 1]
        self.assertAlmostEqual(float(np.sum(rule.weights * x ** 5)), 1.0 / 6.0, places=14)


class TestNorms(unittest.TestCase):
    """Test cases for integral norms"""

    def setUp(self):
        """Set up the interpolant of sin(pi x) on a fine interval"""
        self.space = FemSpace(unit_interval(128))
        self.values = self.space.interpolate(_sine).values

    def test_l2_and_h1(self):
        """Test the norms against their continuous values"""
        self.assertAlmostEqual(l2(self.space, self.values), np.sqrt(0.5), delta=1e-3)
        self.assertAlmostEqual(h1_semi(self.space, self.values), np.pi / np.sqrt(2.0), delta=1e-2)

    def test_l4_norm(self):
        """Test ||sin(pi x)||_L4 = (3/8)^(1/4)"""
        self.assertAlmostEqual(lp(self.space, self.values, 4), (3.0 / 8.0) ** 0.25, delta=1e-3)

    def test_lp_on_p1_fields_is_exact(self):
        """Test the L6 norm of a hat function"""
        space = FemSpace(unit_interval(2))
        # int of the hat^6 over [0, 1] is 2 * (1/2) / 7
        self.assertAlmostEqual(lp(space, np.array([1.0]), 6), (1.0 / 7.0) ** (1.0 / 6.0), places=12)

    def test_unsupported_exponent(self):
        """Test that p outside {2, 4, 6} is rejected"""
        with self.assertRaises(UnsupportedExponent):
            lp(self.space, self.values, 3)

    def test_error_norms_shrink(self):
        """Test the interpolation error decreases under refinement"""
        errors = []
        for n in (8, 16):
            space = FemSpace(unit_interval(n))
            errors.append(error_norms(space, space.interpolate(_sine).values, _sine, _sine_gradient))
        self.assertLess(errors[1][0], errors[0][0] / 10.0)
        self.assertLess(errors[1][1], errors[0][1] / 3.0)


class TestOperators(unittest.TestCase):
    """Test cases for the Ritz projection, L^h and G^h"""

    def test_discrete_operator_on_single_node(self):
        """Test L^h of the hat function on two cells"""
        space = FemSpace(unit_interval(2))
        xi = discrete_operator_L(space, space.field([1.0]), identity_tensor(), 0.0)
        np.testing.assert_allclose(xi.values, [-8.0])

    def test_green_operator_inverts_L(self):
        """Test G^h(L^h z) = -z"""
        space = FemSpace(unit_square(6))
        tensor = identity_tensor(dimension=2)
        z = space.field(np.random.default_rng(2).standard_normal(space.num_dofs))
        back = discrete_green_G(space, discrete_operator_L(space, z, tensor, 0.0), tensor, 0.0)
        np.testing.assert_allclose(back.values, -z.values, atol=1e-9)

    def test_ritz_projection_is_nodally_exact_in_one_dimension(self):
        """Test the 1-D Ritz projection of sin(pi x) interpolates it"""
        space = FemSpace(unit_interval(16))
        projected = ritz_project(space, _sine, identity_tensor(), 0.0)
        np.testing.assert_allclose(projected.values, space.interpolate(_sine).values, atol=1e-10)

    def test_ritz_projection_reproduces_p1_fields(self):
        """Test that P1 fields are fixed points of the projection in 2-D"""
        space = FemSpace(unit_square(4))
        values = np.random.default_rng(5).standard_normal(space.num_dofs)
        projected = ritz_project(space, lambda x: space.evaluate(values, x), identity_tensor(dimension=2), 0.0)
        np.testing.assert_allclose(projected.values, values, atol=1e-9)

    def test_ritz_projection_orders(self):
        """Test first order in H1 and second order in L2"""
        h1, l2_errors = [], []
        for n in (16, 32):
            space = FemSpace(unit_interval(n))
            projected = ritz_project(space, _sine, identity_tensor(), 0.0)
            value_error, gradient_error = error_norms(space, projected.values, _sine, _sine_gradient)
            l2_errors.append(np.sqrt(value_error))
            h1.append(np.sqrt(gradient_error))
        self.assertTrue(1.8 <= h1[0] / h1[1] <= 2.2)
        self.assertTrue(3.6 <= l2_errors[0] / l2_errors[1] <= 4.4)

    def test_prolongation_is_exact_on_nested_meshes(self):
        """Test prolongated values agree with point evaluation of the coarse field"""
        coarse = FemSpace(unit_square(4))
        fine = FemSpace(refine(coarse.mesh))
        values = np.random.default_rng(7).standard_normal(coarse.num_dofs)
        prolongated = prolongate(coarse, values, fine)
        expected = coarse.evaluate(values, fine.mesh.vertices[fine.interior]).ravel()
        np.testing.assert_allclose(prolongated, expected, atol=1e-12)

    def test_prolongation_on_interval_averages_midpoints(self):
        """Test new midpoints take the average of their neighbours"""
        coarse = FemSpace(unit_interval(2))
        fine = FemSpace(unit_interval(4))
        np.testing.assert_allclose(prolongate(coarse, np.array([1.0]), fine), [0.5, 1.0, 0.5])


class TestLinalg(unittest.TestCase):
    """Test cases for linear solves and matrix dumps"""

    def setUp(self):
        """Set up a tridiagonal SPD matrix"""
        n = 20
        self.matrix = sparse.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]).tocsr()

    def test_solve_spd(self):
        """Test CG solves the system and zero right-hand sides short-circuit"""
        rhs = np.arange(20, dtype=float)
        solution = solve_spd(self.matrix, rhs)
        np.testing.assert_allclose(self.matrix @ solution, rhs, atol=1e-8)
        np.testing.assert_array_equal(solve_spd(self.matrix, np.zeros(20)), np.zeros(20))

    def test_solve_failure_raises(self):
        """Test an exhausted iteration budget is reported"""
        with self.assertRaises(LinearSolveFailure):
            solve_spd(self.matrix, np.ones(20), maxiter=1)

    def test_dump_triplets(self):
        """Test one line per stored entry"""
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_triplets(self.matrix, Path(tmp) / 'K.txt')
            lines = path.read_text().splitlines()
        self.assertEqual(len(lines), self.matrix.nnz)
        self.assertEqual(lines[0].split()[:2], ['0', '0'])


if __name__ == '__main__':
    unittest.main()
