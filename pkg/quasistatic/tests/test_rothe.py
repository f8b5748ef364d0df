import csv
import json
import logging
import tempfile
import unittest
from pathlib import Path

import numpy as np

from ..fem import FemSpace, h1_semi
from ..harness import double_well_problem, exact_problem_1d
from ..increment import NoConvergence, StepCertificate, StepOptions
from ..mesh import poincare_constant, unit_interval
from ..model import (
    InadmissibleProblem,
    ProblemSpec,
    builtin_abs_dissipation,
    check_admissibility,
    identity_tensor,
    quadratic_energy,
    sine_bump_initial,
    zero_force,
)
from ..rothe import (
    InitialInstability,
    RotheError,
    RotheScheme,
    Trajectory,
    default_checkpoints,
    save_trajectory,
)

logging.getLogger('quasistatic').setLevel(logging.WARNING)


class TestRotheScheme(unittest.TestCase):
    """Test cases for the time-incremental scheme"""

    @classmethod
    def setUpClass(cls):
        """Run the exact problem once for the whole class"""
        cls.spec = exact_problem_1d()
        cls.space = FemSpace(unit_interval(16))
        cls.traj = RotheScheme(cls.spec, cls.space).run(40)

    def test_trajectory_shape(self):
        """Test one value row per grid time and one certificate per step"""
        self.assertEqual(len(self.traj), 41)
        self.assertEqual(len(self.traj.certificates), 40)
        self.assertAlmostEqual(self.traj.tau, 0.05)
        self.assertTrue(self.traj.all_passed)

    def test_rest_before_activation(self):
        """Test u stays at zero until the load reaches the yield level"""
        self.assertEqual(h1_semi(self.space, self.traj.values[10]), 0.0)
        self.assertLessEqual(self.traj.initial_margin, 1e-10)

    def test_final_value_matches_exact_solution(self):
        """Test u(2, 1/2) against the closed form"""
        value = float(self.traj.evaluate(2.0, np.array([[0.5]]))[0, 0])
        self.assertAlmostEqual(value, 1.0 - 1.0 / np.cosh(0.5), delta=5e-3)

    def test_runs_are_deterministic(self):
        """Test that a second run reproduces every coefficient"""
        again = RotheScheme(self.spec, self.space).run(40)
        np.testing.assert_array_equal(again.values, self.traj.values)

    def test_difference_quotients(self):
        """Test the first quotient vanishes and the rest are finite differences"""
        quotients = self.traj.difference_quotients()
        np.testing.assert_array_equal(quotients[0], np.zeros(self.space.num_dofs))
        np.testing.assert_allclose(quotients[30], self.traj.difference_quotient(30))

    def test_interpolation_between_grid_times(self):
        """Test the interpolant is affine between steps"""
        midpoint = self.traj.interpolate(1.975)
        np.testing.assert_allclose(midpoint, 0.5 * (self.traj.values[39] + self.traj.values[40]))
        np.testing.assert_array_equal(self.traj.interpolate(-1.0), self.traj.values[0])

    def test_save_trajectory(self):
        """Test checkpoint CSVs and the manifest"""
        with tempfile.TemporaryDirectory() as tmp:
            manifest_path = save_trajectory(self.traj, Path(tmp), self.spec, checkpoints=[0, 40])
            with open(manifest_path) as f:
                manifest = json.load(f)
            with open(Path(tmp) / 'step_000040.csv', newline='') as f:
                rows = list(csv.reader(f))
        self.assertEqual(manifest['N'], 40)
        self.assertEqual([entry['index'] for entry in manifest['checkpoints']], [0, 40])
        self.assertEqual(len(manifest['certificates']), 40)
        self.assertEqual(rows[0], ['vertex', 'x', 'u'])
        self.assertEqual(len(rows), 1 + self.space.mesh.num_vertices)


class TestRotheFailures(unittest.TestCase):
    """Test cases for rejected problems and failing steps"""

    def test_steep_double_well_is_rejected(self):
        """Test mu C_P^2 >= kappa stops the run before any step"""
        spec = double_well_problem(gamma=3.0, dimension=1)
        with self.assertRaises(InadmissibleProblem):
            RotheScheme(spec, FemSpace(unit_interval(8))).run(2)

    def test_gate_uses_lumped_constant(self):
        """Test a double well admissible only for the consistent constant is rejected"""
        space = FemSpace(unit_interval(4))
        spec = double_well_problem(gamma=2.5, dimension=1)
        self.assertTrue(check_admissibility(spec.with_poincare_constant(poincare_constant(space))).passed)

        scheme = RotheScheme(spec, space)

        self.assertAlmostEqual(scheme.spec.poincare_constant, 1.0 / (8.0 * np.sin(np.pi / 8.0)), places=6)
        with self.assertRaises(InadmissibleProblem) as ctx:
            scheme.run(2)
        self.assertLess(ctx.exception.margin, 0.0)

    def test_no_convergence_reports_step(self):
        """Test the failing step index is attached"""
        scheme = RotheScheme(exact_problem_1d(), FemSpace(unit_interval(8)), StepOptions(max_iter=1))
        with self.assertRaises(NoConvergence) as ctx:
            scheme.run(4)
        self.assertEqual(ctx.exception.step, 3)

    def test_unstable_initial_datum_warns(self):
        """Test a moving t = 0 step raises the InitialInstability warning"""
        spec = ProblemSpec(
            dissipation=builtin_abs_dissipation(),
            energy=quadratic_energy(),
            tensor=identity_tensor(),
            force=zero_force(),
            initial=sine_bump_initial(1.0),
            horizon=0.1,
            dimension=1,
        )
        with self.assertWarns(InitialInstability):
            traj = RotheScheme(spec, FemSpace(unit_interval(8))).run(1)
        self.assertGreater(traj.initial_margin, 1e-8)

    def test_invalid_step_count(self):
        """Test that N must be positive"""
        with self.assertRaises(RotheError):
            RotheScheme(exact_problem_1d(), FemSpace(unit_interval(4))).run(0)

    def test_space_must_match_problem(self):
        """Test that a 1-D problem cannot run on a vector space"""
        with self.assertRaises(RotheError):
            RotheScheme(exact_problem_1d(), FemSpace(unit_interval(4), components=2))


class TestTrajectory(unittest.TestCase):
    """Test cases for the trajectory container"""

    def test_shape_validation(self):
        """Test that values must match the grid and the space"""
        space = FemSpace(unit_interval(4))
        with self.assertRaises(RotheError):
            Trajectory(space=space, times=np.array([0.0, 1.0]), values=np.zeros((2, 5)))
        with self.assertRaises(RotheError):
            Trajectory(space=space, times=np.array([1.0, 0.0]), values=np.zeros((2, 3)))

    def test_failed_certificate_is_recorded(self):
        """Test a step missing the Euler-Lagrange tolerance is listed in the manifest"""
        space = FemSpace(unit_interval(4))
        options = StepOptions()
        certificates = [
            StepCertificate(iterations=3, residual=0.0, el_violation=0.0, decreased=True),
            StepCertificate(iterations=9, residual=0.0, el_violation=1e3 * options.el_tolerance, decreased=True),
        ]
        traj = Trajectory(space=space, times=np.array([0.0, 0.5, 1.0]), values=np.zeros((3, 3)),
                          certificates=certificates, options=options)
        self.assertTrue(traj.all_passed)
        self.assertEqual(traj.failed_steps, [2])

        with tempfile.TemporaryDirectory() as tmp:
            with open(save_trajectory(traj, Path(tmp), checkpoints=[0, 2])) as f:
                manifest = json.load(f)

        self.assertEqual(manifest['failed_steps'], [2])
        self.assertFalse(manifest['all_certificates_passed'])
        self.assertEqual([c['passed'] for c in manifest['certificates']], [True, False])
        self.assertEqual(manifest['certificates'][1]['step'], 2)
        self.assertEqual(manifest['step_options']['el_tolerance'], options.el_tolerance)

    def test_failed_steps_without_options(self):
        """Test only the decrease counts when the step options are unknown"""
        certificates = [StepCertificate(iterations=1, residual=1.0, el_violation=1.0, decreased=False)]
        traj = Trajectory(space=FemSpace(unit_interval(4)), times=np.array([0.0, 1.0]), values=np.zeros((2, 3)),
                          certificates=certificates)
        self.assertEqual(traj.failed_steps, [1])

    def test_default_checkpoints(self):
        """Test checkpoints include both ends"""
        self.assertEqual(default_checkpoints(4), [0, 1, 2, 3, 4])
        checkpoints = default_checkpoints(1000)
        self.assertEqual(checkpoints[0], 0)
        self.assertEqual(checkpoints[-1], 1000)
        self.assertEqual(len(checkpoints), 11)


if __name__ == '__main__':
    unittest.main()
