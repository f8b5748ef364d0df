import logging
import tempfile
import unittest
from pathlib import Path
from unittest.mock import MagicMock, patch

from ..estimates import EstimateReport
from ..harness import RunConfig, fit_rate
from ..increment import NoConvergence
from ..manager import ExperimentError, ExperimentManager
from ..models import Suite

logging.getLogger('quasistatic').setLevel(logging.WARNING)


class TestExperimentManager(unittest.TestCase):
    """Test cases for ExperimentManager"""

    def setUp(self):
        """Set up test fixtures"""
        self.writer = MagicMock()
        self.writer.output_dir = Path('results')
        self.manager = ExperimentManager(self.writer)

    def test_resolve_builtin_problem(self):
        """Test built-in names resolve with their exact solutions"""
        spec, exact = self.manager.resolve_problem('exact_1d')
        self.assertEqual(spec.name, 'exact_1d')
        self.assertIsNotNone(exact)
        _, exact = self.manager.resolve_problem('double_well_1d')
        self.assertIsNone(exact)

    def test_resolve_unknown_problem(self):
        """Test unknown names are reported as experiment errors"""
        with self.assertRaises(ExperimentError):
            self.manager.resolve_problem('no_such_problem')

    def test_zero_dim(self):
        """Test the zero-dimensional oracle passes and writes its tables"""
        outcome = self.manager.zero_dim()
        self.assertTrue(outcome.passed)
        self.assertEqual(self.writer.write_zero_dim.call_count, 4)
        self.writer.write_summary.assert_called_once()
        self.assertTrue(outcome.summary['first_order'])

    def test_zero_dim_table_to_file(self):
        """Test one stepper table goes to the requested CSV file"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'tables' / 'global.csv'
            outcome = self.manager.zero_dim_table('global', tau=0.1, horizon=2.0, path=path)

            lines = path.read_text().splitlines()

        self.assertTrue(outcome.passed)
        self.assertEqual(lines[0], 't,u,locally_stable,globally_stable,balance_defect')
        self.assertEqual(len(lines), 22)
        self.assertEqual(outcome.summary['samples'], 21)
        self.writer.write_zero_dim.assert_not_called()

    def test_zero_dim_table_default_name(self):
        """Test the table falls back to the output directory"""
        outcome = self.manager.zero_dim_table('local', tau=0.01, horizon=2.0)
        traj, name = self.writer.write_zero_dim.call_args[0]
        self.assertEqual(name, 'zero_dim_local')
        self.assertEqual(len(traj), 201)
        self.assertIsNone(outcome.summary['exit_time'])

    def test_zero_dim_table_unknown_mode(self):
        """Test an unknown mode is reported as an experiment error"""
        with self.assertRaises(ExperimentError):
            self.manager.zero_dim_table('viscous')

    @patch('quasistatic.manager.coercivity_family')
    @patch('quasistatic.manager.RotheScheme')
    def test_verify_reports_failed_suite(self, mock_scheme, mock_family):
        """Test a failed asserted suite fails the outcome"""
        mock_scheme.return_value.run.return_value = MagicMock()
        mock_family.return_value = EstimateReport('coercivity', passed=False)
        config = RunConfig(problem='exact_1d', n_space=4, n_time=4)

        outcome = self.manager.verify(config, [Suite.COERCIVITY])

        self.assertFalse(outcome.passed)
        self.assertEqual(mock_scheme.return_value.run.call_count, 3)
        self.writer.write_suite.assert_called_once_with(mock_family.return_value)
        self.assertIn('coercivity', outcome.summary)

    @patch('quasistatic.manager.space_family')
    @patch('quasistatic.manager.RotheScheme')
    def test_verify_report_only_suite_never_fails(self, mock_scheme, mock_family):
        """Test report-only suites do not fail the outcome"""
        mock_scheme.return_value.run.return_value = MagicMock()
        mock_family.return_value = EstimateReport('space', passed=False, asserted=False)

        outcome = self.manager.verify(RunConfig(n_space=4, n_time=4), [Suite.SPACE])

        self.assertTrue(outcome.passed)

    @patch('quasistatic.manager.sweep_and_fit')
    def test_sweep_writes_both_fits(self, mock_sweep):
        """Test sweeps write one file per parameter"""
        h_fit = fit_rate([0.1, 0.05, 0.025], [1e-2, 5e-3, 2.5e-3])
        tau_fit = fit_rate([0.1, 0.05, 0.025], [1e-2, 5e-3, 2.5e-3], parameter='tau')
        mock_sweep.return_value = (h_fit, tau_fit)

        outcome = self.manager.sweep(RunConfig(problem='exact_1d'))

        self.assertTrue(outcome.passed)
        self.assertEqual(self.writer.write_sweep.call_count, 2)
        self.writer.write_sweep.assert_any_call(tau_fit, 'sweep_tau')
        self.assertTrue(outcome.summary['tau_asserted'])

    @patch('quasistatic.manager.sweep_and_fit')
    def test_rough_force_tau_rate_is_not_asserted(self, mock_sweep):
        """Test a slow tau-rate does not fail a rough-force sweep"""
        h_fit = fit_rate([0.1, 0.05, 0.025], [1e-2, 5e-3, 2.5e-3])
        tau_fit = fit_rate([0.1, 0.05, 0.025], [1e-2, 9e-3, 8e-3], theory=0.5, parameter='tau')
        mock_sweep.return_value = (h_fit, tau_fit)

        outcome = self.manager.sweep(RunConfig(problem='rough_1d'))

        self.assertFalse(tau_fit.passed)
        self.assertTrue(outcome.passed)

    @patch('quasistatic.manager.RotheScheme')
    def test_run_failure(self, mock_scheme):
        """Test solver failures become experiment errors"""
        mock_scheme.return_value.run.side_effect = NoConvergence('stalled', residual=1.0, step=3)

        with self.assertRaises(ExperimentError) as context:
            self.manager.run(RunConfig(problem='exact_1d', n_space=4, n_time=4))

        self.assertIn('stalled', str(context.exception))
        self.writer.write_summary.assert_not_called()


if __name__ == '__main__':
    unittest.main()
