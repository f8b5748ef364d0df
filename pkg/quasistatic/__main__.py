"""Main entry point for the quasistatic solver and verification harness."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from quasistatic.config import config, load_document
from quasistatic.harness import ResultWriter, RunConfig
from quasistatic.logger import attach_run_log, get_logger
from quasistatic.manager import ExperimentManager, ExperimentOutcome
from quasistatic.models import SolutionMode, Suite

logger = get_logger(__name__)

DEFAULT_TAUS = [1e-2, 1e-3, 1e-4]
DEFAULT_TABLE_TAU = 1e-3


def _run_options() -> argparse.ArgumentParser:
    """Options shared by run, sweep and verify; they may also follow the subcommand."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--config', type=Path, default=argparse.SUPPRESS,
                        help='Run configuration document (JSON or YAML)')
    parent.add_argument('--out', dest='output_dir', type=Path, default=argparse.SUPPRESS,
                        help='Directory for result files')
    return parent


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        prog='quasistatic',
        description='Rate-independent quasistatic solver and verification harness'
    )
    parser.add_argument(
        '--config',
        type=Path,
        help='Run configuration document (JSON or YAML)'
    )
    parser.add_argument(
        '--output-dir',
        type=Path,
        help=f'Directory for result files (default: {config.output_dir})'
    )
    parser.add_argument(
        '--workers',
        type=int,
        default=1,
        help='Concurrent sweep cells (default: 1)'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    common = _run_options()

    run = subparsers.add_parser('run', parents=[common], help='Run one Rothe trajectory')
    run.add_argument('--problem', help='Built-in problem name or problem document')
    run.add_argument('--n-space', '-n', dest='n', type=int, help='Cells per unit length')
    run.add_argument('--n-time', '-N', dest='N', type=int, help='Number of time steps')

    subparsers.add_parser('sweep', parents=[common], help='h- and tau-sweeps with rate fits')

    verify = subparsers.add_parser('verify', parents=[common], help='Run a-priori estimate suites')
    verify.add_argument(
        '--suite',
        choices=[str(s) for s in Suite],
        default=str(Suite.ALL),
        help='Suite to run (default: all)'
    )

    zero_dim = subparsers.add_parser('zero-dim', help='Zero-dimensional double-well oracle')
    zero_dim.add_argument(
        '--mode',
        choices=[str(m) for m in SolutionMode],
        help='Write the table of one branch or stepper instead of running the oracle checks'
    )
    zero_dim.add_argument(
        '--tau',
        type=float,
        nargs='+',
        help=f'Step sizes (default: {DEFAULT_TAUS}, or {DEFAULT_TABLE_TAU} with --mode)'
    )
    zero_dim.add_argument('--T', '-T', dest='T', type=float, default=2.0, help='Horizon (default: 2)')
    zero_dim.add_argument('--out', dest='table', type=Path, help='CSV file for the --mode table')

    args = parser.parse_args(argv)
    if args.command == 'zero-dim':
        if args.mode is None and args.table is not None:
            parser.error('zero-dim: --out needs --mode')
        if args.mode is not None and args.tau is not None and len(args.tau) != 1:
            parser.error('zero-dim: --mode takes a single --tau')
    return args


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional document with command line overrides."""
    document = load_document(args.config) if args.config else {}
    run_config = RunConfig.from_dict(document)
    if args.output_dir is not None:
        run_config.output_dir = args.output_dir
    elif 'output_dir' not in document:
        run_config.output_dir = config.output_dir
    if getattr(args, 'problem', None):
        run_config.problem = args.problem
    if getattr(args, 'n', None) is not None:
        run_config.n_space = args.n
    if getattr(args, 'N', None) is not None:
        run_config.n_time = args.N
    return run_config


def run_zero_dim(manager: ExperimentManager, args: argparse.Namespace) -> ExperimentOutcome:
    """Oracle checks over several step sizes, or one table with --mode."""
    if args.mode is None:
        return manager.zero_dim(taus=args.tau or DEFAULT_TAUS, horizon=args.T)
    tau = args.tau[0] if args.tau else DEFAULT_TABLE_TAU
    return manager.zero_dim_table(args.mode, tau=tau, horizon=args.T, path=args.table)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the application."""
    try:
        args = parse_args(argv)
        run_config = build_run_config(args)
        if config.logging.to_file:
            attach_run_log(command=args.command)
        manager = ExperimentManager(ResultWriter(run_config.output_dir), max_workers=args.workers)

        logger.info(f"Starting '{args.command}' with results in {run_config.output_dir}")
        if args.command == 'run':
            outcome = manager.run(run_config)
        elif args.command == 'sweep':
            outcome = manager.sweep(run_config)
        elif args.command == 'verify':
            outcome = manager.verify(run_config, [Suite(args.suite)])
        else:
            outcome = run_zero_dim(manager, args)

        if not outcome.passed:
            logger.error(f"'{args.command}' finished with failed criteria")
            return 1
        logger.info(f"'{args.command}' completed successfully")
        return 0

    except Exception as e:
        logger.error(f"Error running quasistatic: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
