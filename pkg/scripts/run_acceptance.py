#!/usr/bin/env python3
"""Run the acceptance experiments at full scale and print a summary table."""

import sys
import time
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

# Add parent directory to Python path to import quasistatic
sys.path.append(str(Path(__file__).parent.parent))
from quasistatic.estimates import (
    sobolev_family,
    time_derivative_family,
    uniqueness_probe,
)
from quasistatic.fem import FemSpace, error_norms, ritz_project
from quasistatic.harness import double_well_problem, exact_problem_1d, sweep_and_fit
from quasistatic.harness.problems import SCALAR_EXACT
from quasistatic.logger import get_logger
from quasistatic.mesh import poincare_constant, structured_mesh
from quasistatic.model import check_admissibility, identity_tensor
from quasistatic.rothe import RotheScheme
from quasistatic.zero_dim import energy_balance_residual, exact_solution, simulate, time_error_l1

logger = get_logger(__name__)

Outcome = Tuple[bool, str]


def zero_dim_oracle() -> Outcome:
    taus = (1e-2, 1e-3, 1e-4)
    targets = {'global': 'weak', 'local': 'strong'}
    pointwise, errors = {}, {mode: [] for mode in targets}
    for tau in taus:
        for mode, target in targets.items():
            traj = simulate(mode, tau, 2.0)
            errors[mode].append(time_error_l1(traj, target))
            if tau == 1e-3:
                pointwise[mode] = abs(traj.value_at(1.5) - exact_solution(target, 1.5))
    within = all(value <= 5e-3 for value in pointwise.values())
    first_order = all(
        errors[mode][i + 1] <= max(errors[mode][i] * taus[i + 1] / taus[i] * 1.5, taus[i + 1] ** 2)
        for mode in targets for i in range(len(taus) - 1)
    )
    return within and first_order, (f"global {pointwise['global']:.2e}, local {pointwise['local']:.2e} at tau=1e-3; "
                                    f"L1 errors {errors['global'][-1]:.1e}/{errors['local'][-1]:.1e} at tau=1e-4")


def energy_balance() -> Outcome:
    weak = energy_balance_residual(simulate('weak', 1e-4, 2.0))
    strong = energy_balance_residual(simulate('strong', 1e-4, 2.0))
    return max(weak, strong) <= 1e-3, f"weak {weak:.2e}, strong {strong:.2e}"


def convergence_rates() -> Outcome:
    h_fit, tau_fit = sweep_and_fit(exact_problem_1d(), SCALAR_EXACT, [16, 32, 64, 128], [125, 250, 500, 1000],
                                   fixed_space=256, fixed_time=4000)
    return h_fit.passed and tau_fit.passed, f"h-slope {h_fit.slope:.3f}, tau-slope {tau_fit.slope:.3f}"


def time_derivative() -> Outcome:
    spec = exact_problem_1d()
    family = []
    for n, N in ((32, 500), (64, 1000), (128, 2000)):
        space = FemSpace(structured_mesh(1, n))
        family.append(RotheScheme(spec, space).run(N))
    spec = spec.with_poincare_constant(poincare_constant(family[-1].space))
    report = time_derivative_family(family, spec, factor=1.5)
    return report.passed, f"spread {report.details['spread']:.3f}"


def discrete_sobolev() -> Outcome:
    spaces = [FemSpace(structured_mesh(2, n)) for n in (8, 16, 32)]
    report = sobolev_family(spaces, identity_tensor(dimension=2))
    ratios = ', '.join(f"{value:.3f}" for value in report.measured())
    return report.passed, f"ratios {ratios}"


def projector_orders() -> Outcome:
    tensor = exact_problem_1d().tensor
    h1, l2 = [], []
    for n in (16, 32, 64):
        space = FemSpace(structured_mesh(1, n))
        projected = ritz_project(space, lambda x: np.sin(np.pi * x[:, :1]), tensor, 0.0)
        value_error, gradient_error = error_norms(
            space, projected.values,
            lambda x: np.sin(np.pi * x[:, :1]),
            lambda x: (np.pi * np.cos(np.pi * x[:, :1]))[:, :, None],
        )
        l2.append(np.sqrt(value_error))
        h1.append(np.sqrt(gradient_error))
    h1_ratio, l2_ratio = h1[-2] / h1[-1], l2[-2] / l2[-1]
    passed = 1.8 <= h1_ratio <= 2.2 and 3.6 <= l2_ratio <= 4.4
    return passed, f"H1 ratio {h1_ratio:.3f}, L2 ratio {l2_ratio:.3f}"


def poincare_constants() -> Outcome:
    one = poincare_constant(FemSpace(structured_mesh(1, 256)))
    two = poincare_constant(FemSpace(structured_mesh(2, 128)))
    passed = abs(one - 1.0 / np.pi) <= 1e-4 and abs(two - 1.0 / (np.pi * np.sqrt(2.0))) <= 1e-3
    return passed, f"1D {one:.6f}, 2D {two:.6f}"


def admissibility_gate() -> Outcome:
    c_p = poincare_constant(FemSpace(structured_mesh(1, 64)))
    mild = check_admissibility(double_well_problem(gamma=0.1, dimension=1), poincare_constant=c_p)
    steep = check_admissibility(double_well_problem(gamma=3.0, dimension=1), poincare_constant=c_p)
    return mild.passed and not steep.passed, f"margins {mild.convexity_margin:.4f} / {steep.convexity_margin:.4f}"


def uniqueness() -> Outcome:
    divergence = uniqueness_probe(exact_problem_1d(), FemSpace(structured_mesh(1, 64)), 1000, 1e-3)
    return divergence <= 1e-8, f"divergence {divergence:.2e}"


CRITERIA: List[Tuple[str, Callable[[], Outcome]]] = [
    ('zero-dim oracle', zero_dim_oracle),
    ('energy balance', energy_balance),
    ('convergence rates', convergence_rates),
    ('time-derivative bound', time_derivative),
    ('discrete Sobolev', discrete_sobolev),
    ('projector orders', projector_orders),
    ('Poincare constants', poincare_constants),
    ('admissibility gate', admissibility_gate),
    ('uniqueness probe', uniqueness),
]


def main() -> int:
    console = Console()
    table = Table(title="Acceptance")
    table.add_column("#", justify="right")
    table.add_column("criterion")
    table.add_column("measured")
    table.add_column("seconds", justify="right")
    table.add_column("verdict")

    failures = 0
    for index, (name, check) in enumerate(CRITERIA, start=1):
        started = time.perf_counter()
        try:
            passed, measured = check()
        except Exception as e:
            logger.error(f"Criterion '{name}' raised: {e}")
            passed, measured = False, f"error: {e}"
        elapsed = time.perf_counter() - started
        failures += not passed
        table.add_row(str(index), name, measured, f"{elapsed:.1f}",
                      "[green]PASS[/green]" if passed else "[red]FAIL[/red]")

    console.print(table)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
