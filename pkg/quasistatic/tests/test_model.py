import logging
import unittest
from dataclasses import replace

import numpy as np

from ..model import (
    InadmissibleProblem,
    ModelError,
    ProblemSpec,
    builtin_abs_dissipation,
    builtin_double_well,
    builtin_weighted_l1,
    check_admissibility,
    identity_tensor,
    load_problem,
    oscillating_tensor,
    power_force,
    quadratic_energy,
    ramp_force,
    shifted_power_energy,
    zero_initial,
)

logging.getLogger('quasistatic').setLevel(logging.WARNING)


def _double_well_spec(gamma: float) -> ProblemSpec:
    return ProblemSpec(
        dissipation=builtin_abs_dissipation(),
        energy=builtin_double_well(gamma),
        tensor=identity_tensor(),
        force=ramp_force(),
        initial=zero_initial(),
        horizon=1.0,
        dimension=1,
    )


class TestPotentials(unittest.TestCase):
    """Test cases for the dissipation and energy densities"""

    def test_abs_prox_soft_thresholds(self):
        """Test that the abs prox shrinks vectors by the threshold and kills short ones"""
        R = builtin_abs_dissipation()
        x = np.array([[3.0, 4.0], [0.3, 0.4], [0.0, 0.0]])
        result = R.prox(x, 1.0)
        np.testing.assert_allclose(result[0], [2.4, 3.2])
        np.testing.assert_array_equal(result[1], [0.0, 0.0])
        np.testing.assert_array_equal(result[2], [0.0, 0.0])

    def test_abs_prox_per_row_threshold(self):
        """Test that the threshold broadcasts row by row"""
        R = builtin_abs_dissipation(scale=2.0)
        x = np.array([[1.0], [1.0]])
        result = R.prox(x, np.array([0.25, 1.0]))
        np.testing.assert_allclose(result.ravel(), [0.5, 0.0])

    def test_weighted_l1_prox_is_componentwise(self):
        """Test weighted l1 thresholds each component with its own scale"""
        R = builtin_weighted_l1([1.0, 2.0])
        result = R.prox(np.array([[3.0, -3.0]]), 1.0)
        np.testing.assert_allclose(result, [[2.0, -1.0]])
        self.assertAlmostEqual(float(R.evaluate(np.array([[1.0, -1.0]]))[0]), 3.0)

    def test_invalid_parameters_raise(self):
        """Test that nonpositive parameters are rejected"""
        with self.assertRaises(ModelError):
            builtin_abs_dissipation(scale=0.0)
        with self.assertRaises(ModelError):
            builtin_double_well(-1.0)
        with self.assertRaises(ModelError):
            builtin_weighted_l1([1.0, 0.0])

    def test_energy_gradients_match_finite_differences(self):
        """Test analytic gradients against central differences"""
        rng = np.random.default_rng(3)
        points = rng.uniform(-2.0, 2.0, size=(50, 2))
        step = 1e-6
        for energy in (builtin_double_well(0.3), quadratic_energy(2.0), shifted_power_energy(3.0)):
            fd = np.empty_like(points)
            for c in range(2):
                shift = np.zeros(2)
                shift[c] = step
                fd[:, c] = (energy.value(points + shift) - energy.value(points - shift)) / (2.0 * step)
            exact = energy.gradient(points)
            error = np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact)))
            self.assertLessEqual(error, 1e-6, energy.name)

    def test_double_well_modulus(self):
        """Test mu = 4 gamma and the curvature bound at the origin"""
        energy = builtin_double_well(0.25)
        self.assertEqual(energy.mu, 1.0)
        self.assertEqual(energy.curvature_bound(0.0), 1.0)
        np.testing.assert_allclose(energy.hessian(np.zeros((1, 1))), [[[-1.0]]])


class TestProblemSpec(unittest.TestCase):
    """Test cases for ProblemSpec validation"""

    def test_rejects_nonpositive_horizon(self):
        """Test that T must be positive"""
        with self.assertRaises(ModelError):
            ProblemSpec(
                dissipation=builtin_abs_dissipation(),
                energy=quadratic_energy(),
                tensor=identity_tensor(),
                force=ramp_force(),
                initial=zero_initial(),
                horizon=0.0,
                dimension=1,
            )

    def test_rejects_tensor_of_wrong_dimension(self):
        """Test that the tensor must match the space dimension"""
        with self.assertRaises(ModelError):
            ProblemSpec(
                dissipation=builtin_abs_dissipation(),
                energy=quadratic_energy(),
                tensor=identity_tensor(dimension=2),
                force=ramp_force(),
                initial=zero_initial(),
                horizon=1.0,
                dimension=1,
            )

    def test_convexity_margin_needs_poincare_constant(self):
        """Test the margin is unknown until C_P is set"""
        spec = _double_well_spec(0.1)
        self.assertIsNone(spec.convexity_margin)
        margin = spec.with_poincare_constant(1.0 / np.pi).convexity_margin
        self.assertAlmostEqual(margin, 1.0 - 0.4 / np.pi ** 2)

    def test_power_force_records_time_exponent(self):
        """Test the rough force reports a = 1/(1-e)"""
        force = power_force(exponent=0.5)
        self.assertAlmostEqual(force.time_exponent, 2.0)
        self.assertEqual(ramp_force().time_exponent, float('inf'))


class TestAdmissibility(unittest.TestCase):
    """Test cases for the sampled admissibility checks"""

    def test_mild_double_well_passes(self):
        """Test gamma = 0.1 on the unit interval is admissible"""
        report = check_admissibility(_double_well_spec(0.1), poincare_constant=1.0 / np.pi, samples=2000)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.convexity_margin, 1.0 - 0.4 / np.pi ** 2)
        for name in ('A2.homogeneity', 'A3.growth', 'A3.semi_monotonicity', 'A4.symmetry', 'A5.time_derivative'):
            self.assertTrue(report.get(name).passed, name)

    def test_steep_double_well_is_rejected(self):
        """Test gamma = 3 violates mild convexity and raise_for_status raises"""
        report = check_admissibility(_double_well_spec(3.0), poincare_constant=1.0 / np.pi, samples=2000)
        self.assertFalse(report.passed)
        self.assertFalse(report.get('muCP').passed)
        with self.assertRaises(InadmissibleProblem) as ctx:
            report.raise_for_status()
        self.assertLess(ctx.exception.margin, 0.0)

    def test_oscillating_tensor_is_elliptic(self):
        """Test the ellipticity check on a space-dependent tensor"""
        spec = ProblemSpec(
            dissipation=builtin_abs_dissipation(),
            energy=quadratic_energy(),
            tensor=oscillating_tensor(amplitude=0.5),
            force=ramp_force(),
            initial=zero_initial(),
            horizon=1.0,
            dimension=1,
        )
        report = check_admissibility(spec, poincare_constant=1.0 / np.pi, samples=500)
        self.assertTrue(report.get('A4.ellipticity').passed)
        self.assertAlmostEqual(report.kappa, 0.5)

    def test_overstated_ellipticity_is_rejected(self):
        """Test a tensor claiming a larger kappa than it has fails the gate"""
        spec = ProblemSpec(
            dissipation=builtin_abs_dissipation(),
            energy=quadratic_energy(),
            tensor=replace(identity_tensor(), kappa=2.0),
            force=ramp_force(),
            initial=zero_initial(),
            horizon=1.0,
            dimension=1,
        )
        report = check_admissibility(spec, poincare_constant=1.0 / np.pi, samples=500)
        self.assertTrue(report.get('muCP').passed)
        self.assertFalse(report.get('A4.ellipticity').passed)
        self.assertFalse(report.passed)
        with self.assertRaises(InadmissibleProblem) as ctx:
            report.raise_for_status()
        self.assertIn('A4.ellipticity', str(ctx.exception))
        self.assertAlmostEqual(ctx.exception.margin, -1.0, places=9)

    def test_missing_poincare_constant_raises(self):
        """Test that the check needs C_P"""
        with self.assertRaises(ModelError):
            check_admissibility(_double_well_spec(0.1))


class TestLoader(unittest.TestCase):
    """Test cases for problem documents"""

    def setUp(self):
        """Set up a valid document"""
        self.document = {
            'name': 'doc',
            'dissipation': {'name': 'abs', 'scale': 1.0},
            'energy': {'name': 'double_well', 'gamma': 0.1},
            'tensor': 'identity',
            'force': {'name': 'ramp', 'slope': 2.0, 'profile': 'sine'},
            'initial': 'zero',
            'T': 1.0,
            'd': 2,
        }

    def test_load_from_mapping(self):
        """Test building a problem from a parsed mapping"""
        spec = load_problem(self.document)
        self.assertEqual(spec.name, 'doc')
        self.assertEqual(spec.dimension, 2)
        self.assertEqual(spec.energy.mu, 0.4)
        self.assertEqual(spec.tensor.dimension, 2)
        value = spec.force.evaluate(0.5, np.array([[0.5, 0.5]]))
        np.testing.assert_allclose(value, [[1.0]])

    def test_unknown_preset_raises(self):
        """Test that an unknown preset name is reported"""
        self.document['energy'] = {'name': 'nope'}
        with self.assertRaises(ModelError):
            load_problem(self.document)

    def test_missing_key_raises(self):
        """Test that a missing section is reported"""
        del self.document['force']
        with self.assertRaises(ModelError):
            load_problem(self.document)

    def test_bad_parameters_raise(self):
        """Test that unexpected preset parameters are reported"""
        self.document['energy'] = {'name': 'double_well', 'depth': 1.0}
        with self.assertRaises(ModelError):
            load_problem(self.document)


if __name__ == '__main__':
    unittest.main()
