import logging
import unittest

import numpy as np

from ..zero_dim import (
    BranchExit,
    OutOfDomain,
    ScalarTrajectory,
    ZeroDimError,
    energy_balance_residual,
    exact_solution,
    scalar_pde_reference,
    simulate,
    stability_check,
    step_global,
    step_local,
    time_error_l1,
)

logging.getLogger('quasistatic').setLevel(logging.WARNING)


class TestClosedForms(unittest.TestCase):
    """Test cases for the closed-form solutions of the scalar double well"""

    def test_branches_before_and_after_activation(self):
        """Test that every branch rests at -1 before t = 1 and splits afterwards"""
        for mode in ('weak', 'strong', 'extended'):
            self.assertEqual(exact_solution(mode, 0.5), -1.0)
        self.assertEqual(exact_solution('weak', 1.5), 1.25)
        self.assertEqual(exact_solution('strong', 1.5), -0.75)
        self.assertEqual(exact_solution('extended', 2.5), -0.25)
        self.assertEqual(exact_solution('extended', 3.5), 2.25)

    def test_strong_solution_ends_at_three(self):
        """Test that the strong branch is undefined from t = 3 on"""
        with self.assertRaises(OutOfDomain):
            exact_solution('strong', 3.0)
        with self.assertRaises(OutOfDomain):
            exact_solution('weak', -0.1)

    def test_scalar_pde_reference(self):
        """Test the exact solution of the one-dimensional model problem"""
        value, gradient = scalar_pde_reference(0.5, 2.0)
        self.assertAlmostEqual(float(value), 1.0 - 1.0 / np.cosh(0.5), places=12)
        _, gradient = scalar_pde_reference(0.0, 2.0)
        self.assertAlmostEqual(float(gradient), np.tanh(0.5), places=12)
        value, _ = scalar_pde_reference(np.linspace(0.0, 1.0, 5), 0.8)
        np.testing.assert_array_equal(value, np.zeros(5))
        with self.assertRaises(ZeroDimError):
            scalar_pde_reference(1.5, 2.0)


class TestSteppers(unittest.TestCase):
    """Test cases for the global and branch-restricted steppers"""

    def test_single_steps_hit_the_branches(self):
        """Test the worked steps from u = -1 at t = 1.5"""
        for tau in (1e-2, 1e-3, 1.0):
            self.assertEqual(step_global(-1.0, 1.5, tau), 1.25)
            self.assertEqual(step_local(-1.0, 1.5, tau), -0.75)

    def test_global_stepper_stays_put_on_the_tie(self):
        """Test that at t = 1 the tie goes to the previous value"""
        self.assertEqual(step_global(-1.0, 1.0, 0.1), -1.0)

    def test_nonpositive_tau_raises(self):
        """Test that tau must be positive"""
        with self.assertRaises(ZeroDimError):
            step_global(-1.0, 1.0, 0.0)
        with self.assertRaises(ZeroDimError):
            step_local(-1.0, 1.0, -1.0)

    def test_local_stepper_needs_a_branch_at_zero(self):
        """Test that u_prev = 0 without a branch is rejected"""
        with self.assertRaises(ZeroDimError):
            step_local(0.0, 1.0, 0.1)

    def test_local_stepper_exits_near_three(self):
        """Test that the branch-restricted stepper stops at the convexity boundary"""
        with self.assertRaises(BranchExit):
            step_local(-0.01, 3.1, 0.1)
        traj = simulate('local', 1e-2, 4.0)
        self.assertIsNotNone(traj.exit_time)
        self.assertAlmostEqual(traj.exit_time, 3.0, delta=0.05)
        self.assertLess(traj.values[-1], 0.0)

    def test_simulated_steppers_match_closed_forms(self):
        """Test the steppers against the weak and strong branches at t = 1.5"""
        for tau in (1e-2, 1e-3):
            weak = simulate('global', tau, 2.0)
            strong = simulate('local', tau, 2.0)
            self.assertLessEqual(abs(weak.value_at(1.5) - 1.25), 5e-3)
            self.assertLessEqual(abs(strong.value_at(1.5) + 0.75), 5e-3)

    def test_global_stepper_jumps_after_activation(self):
        """Test the global stepper jumps to the positive well right after t = 1"""
        traj = simulate('global', 0.1, 2.0)
        index = int(np.argmax(traj.values > 0.0))
        self.assertAlmostEqual(traj.times[index], 1.1)
        self.assertTrue(np.all(traj.values[:index] == -1.0))


class TestTimeError(unittest.TestCase):
    """Test cases for the L1-in-time error of the interpolated steppers"""

    # grids whose nodes miss the activation time t = 1
    TAUS = (0.07, 0.007, 0.0007)
    HORIZON = 2.1

    def test_global_stepper_is_first_order_off_grid(self):
        """Test the jump of the global stepper costs an L1 error of order tau"""
        errors = [time_error_l1(simulate('global', tau, self.HORIZON), 'weak') for tau in self.TAUS]
        slope = np.polyfit(np.log(self.TAUS), np.log(errors), 1)[0]
        self.assertGreaterEqual(slope, 0.8)
        self.assertLessEqual(slope, 1.25)

    def test_local_stepper_error_lives_between_grid_points(self):
        """Test the local stepper is exact at grid times but not in between"""
        errors = []
        for tau in self.TAUS:
            traj = simulate('local', tau, self.HORIZON)
            exact = np.array([exact_solution('strong', t) for t in traj.times])
            self.assertLessEqual(np.max(np.abs(traj.values - exact)), 1e-12)
            errors.append(time_error_l1(traj, 'strong'))

        # the chord across the kink at t = 1 leaves a triangle of area p(1-p) tau^2 / 4
        tau = self.TAUS[0]
        p = (1.0 - tau * np.floor(1.0 / tau)) / tau
        self.assertAlmostEqual(errors[0], p * (1.0 - p) * tau ** 2 / 4.0, places=10)
        for coarse, fine, ratio in zip(errors, errors[1:], [10.0, 10.0]):
            self.assertGreater(fine, 0.0)
            self.assertLessEqual(fine, coarse / ratio)

    def test_aligned_grid_hides_the_local_error(self):
        """Test a grid through t = 1 reproduces the strong branch up to rounding"""
        traj = simulate('local', 0.01, 2.0)
        self.assertLessEqual(time_error_l1(traj, 'strong'), 1e-10)

    def test_sampled_closed_form_matches_local_stepper(self):
        """Test the interpolated strong branch carries the same kink error as the stepper"""
        local = time_error_l1(simulate('local', 0.07, self.HORIZON), 'strong')
        sampled = time_error_l1(simulate('strong', 0.07, self.HORIZON), 'strong')
        self.assertAlmostEqual(local, sampled, places=12)


class TestStability(unittest.TestCase):
    """Test cases for local and global stability"""

    def test_strong_branch_is_only_locally_stable(self):
        """Test the strong branch at t = 1.5"""
        self.assertTrue(stability_check(1.5, -0.75, 'local'))
        self.assertFalse(stability_check(1.5, -0.75, 'global'))

    def test_weak_branch_is_stable_in_both_senses(self):
        """Test the weak branch at t = 1.5"""
        self.assertTrue(stability_check(1.5, 1.25, 'global'))
        self.assertTrue(stability_check(1.5, 1.25, 'local'))

    def test_unknown_kind_raises(self):
        """Test that only global and local stability exist"""
        with self.assertRaises(ZeroDimError):
            stability_check(1.5, 1.25, 'weak')


class TestEnergyBalance(unittest.TestCase):
    """Test cases for the energy balance of sampled trajectories"""

    def test_closed_forms_balance(self):
        """Test the weak and strong branches satisfy the energy balance"""
        for mode in ('weak', 'strong'):
            traj = simulate(mode, 1e-4, 2.0)
            self.assertLessEqual(energy_balance_residual(traj), 1e-3, mode)

    def test_resting_trajectory_has_no_defect(self):
        """Test that u = -1 before activation has zero defect"""
        traj = simulate('weak', 0.1, 0.9)
        self.assertAlmostEqual(energy_balance_residual(traj), 0.0, places=12)

    def test_trajectory_validation(self):
        """Test that mismatched or unordered grids are rejected"""
        with self.assertRaises(ZeroDimError):
            ScalarTrajectory(times=np.array([0.0, 1.0]), values=np.array([0.0]), mode='weak')
        with self.assertRaises(ZeroDimError):
            ScalarTrajectory(times=np.array([1.0, 0.0]), values=np.array([0.0, 0.0]), mode='weak')


if __name__ == '__main__':
    unittest.main()
