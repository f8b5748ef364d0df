"""
Refinement sweeps and log-log rate fits of the squared space-time H1 error.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from ..fem.space import FemSpace
from ..increment.models import StepOptions
from ..logger import get_logger
from ..mesh.builder import structured_mesh
from ..model.data import ProblemSpec
from ..rothe.models import Trajectory
from ..rothe.scheme import RotheScheme
from .errors import error_l2h1, reference_error
from .models import HarnessError, InsufficientLevels, RateFit
from .problems import ExactSolution

logger = get_logger(__name__)

PASS_FRACTION = 0.9
REFERENCE_FACTOR = 4


def fit_rate(params: Sequence[float], sq_errors: Sequence[float], theory: float = 1.0,
             parameter: str = 'h', fixed: float = 0.0) -> RateFit:
    """Least-squares slope of log(sq_error) against log(param).

    Levels are sorted by decreasing parameter first.

    Raises:
        InsufficientLevels: With fewer than 3 points
        HarnessError: If an error is not positive
    """
    params = np.asarray(params, dtype=float)
    sq_errors = np.asarray(sq_errors, dtype=float)
    if params.size < 3:
        raise InsufficientLevels(f"a rate fit needs at least 3 levels, got {params.size}")
    if np.any(sq_errors <= 0) or np.any(params <= 0):
        raise HarnessError("log-log fits need positive parameters and errors")
    order = np.argsort(-params)
    params, sq_errors = params[order], sq_errors[order]
    fit = linregress(np.log(params), np.log(sq_errors))
    slope = float(fit.slope)
    return RateFit(
        params=params,
        sq_errors=sq_errors,
        slope=slope,
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue ** 2),
        theory=theory,
        passed=bool(slope >= PASS_FRACTION * theory),
        parameter=parameter,
        fixed=fixed,
    )


def time_rate_exponent(spec: ProblemSpec) -> float:
    """min(1, a - 1) for f in W^{1,a}(0,T; L^p)."""
    return float(min(1.0, spec.force.time_exponent - 1.0))


@dataclass
class SweepCell:
    """One (n, N) run of a sweep."""
    n: int
    N: int
    trajectory: Trajectory


class SweepRunner:
    """Runs the cells of a sweep, reusing one space per mesh level.

    Args:
        spec: Problem definition
        options: Increment options shared by every run
        max_workers: Thread pool size; 1 runs cells in order
    """

    def __init__(self, spec: ProblemSpec, options: Optional[StepOptions] = None, max_workers: int = 1):
        if max_workers < 1:
            raise HarnessError(f"max_workers must be at least 1, got {max_workers}")
        self.spec = spec
        self.options = options or StepOptions()
        self.max_workers = max_workers
        self._spaces: Dict[int, FemSpace] = {}

    def space(self, n: int) -> FemSpace:
        if n not in self._spaces:
            self._spaces[n] = FemSpace(structured_mesh(self.spec.dimension, n), self.spec.components)
        return self._spaces[n]

    def _run(self, key: Tuple[int, int]) -> SweepCell:
        n, N = key
        logger.info(f"Sweep cell n={n}, N={N}")
        trajectory = RotheScheme(self.spec, self.space(n), self.options).run(N)
        return SweepCell(n=n, N=N, trajectory=trajectory)

    def run(self, keys: Sequence[Tuple[int, int]]) -> Dict[Tuple[int, int], SweepCell]:
        """Run every distinct (n, N) cell; the result is ordered by (h, tau) descending."""
        keys = sorted(set(keys), key=lambda key: (1.0 / key[0], 1.0 / key[1]), reverse=True)
        for n, _ in keys:
            self.space(n)
        if self.max_workers == 1 or len(keys) == 1:
            cells = [self._run(key) for key in keys]
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                cells = list(pool.map(self._run, keys))
        return {key: cell for key, cell in zip(keys, cells)}


def _check_levels(levels: Sequence[int], name: str) -> List[int]:
    levels = sorted(set(int(level) for level in levels))
    if len(levels) < 3:
        raise InsufficientLevels(f"{name} sweep needs at least 3 distinct levels, got {len(levels)}")
    return levels


def sweep_and_fit(
    spec: ProblemSpec,
    exact: Optional[ExactSolution],
    h_levels: Sequence[int],
    tau_levels: Sequence[int],
    fixed_space: Optional[int] = None,
    fixed_time: Optional[int] = None,
    time_reference: str = 'exact',
    options: Optional[StepOptions] = None,
    max_workers: int = 1,
) -> Tuple[RateFit, RateFit]:
    """h- and tau-sweeps with the other parameter held at its finest level.

    Args:
        spec: Problem definition
        exact: Closed-form solution; required unless only ``refined`` tau errors are wanted
            and the h-sweep is skipped
        h_levels: Mesh levels n (h = 1/n)
        tau_levels: Step counts N (tau = T/N)
        fixed_space: n of the tau-sweep, default max(h_levels)
        fixed_time: N of the h-sweep, default max(tau_levels)
        time_reference: 'exact' measures tau-errors against ``exact``; 'refined'
            against a run on the same mesh with 4 max(N) steps
        options: Increment options
        max_workers: Concurrent sweep cells

    Returns:
        Tuple of (fit in h, fit in tau)

    Raises:
        InsufficientLevels: With fewer than 3 levels per parameter
        HarnessError: Without an exact solution, or on an unknown time reference
    """
    h_levels = _check_levels(h_levels, 'h')
    tau_levels = _check_levels(tau_levels, 'tau')
    if time_reference not in ('exact', 'refined'):
        raise HarnessError(f"time_reference must be 'exact' or 'refined', got '{time_reference}'")
    if exact is None:
        raise HarnessError("sweep_and_fit needs an exact solution; use self_reference otherwise")
    n_fixed = fixed_space or max(h_levels)
    N_fixed = fixed_time or max(tau_levels)

    keys = [(n, N_fixed) for n in h_levels] + [(n_fixed, N) for N in tau_levels]
    if time_reference == 'refined':
        N_reference = REFERENCE_FACTOR * max(tau_levels)
        keys.append((n_fixed, N_reference))
    cells = SweepRunner(spec, options, max_workers).run(keys)

    h_errors = [error_l2h1(cells[(n, N_fixed)].trajectory, exact) for n in h_levels]
    if time_reference == 'refined':
        reference = cells[(n_fixed, N_reference)].trajectory
        tau_errors = [reference_error(cells[(n_fixed, N)].trajectory, reference) for N in tau_levels]
    else:
        tau_errors = [error_l2h1(cells[(n_fixed, N)].trajectory, exact) for N in tau_levels]

    h_space = [cells[(n, N_fixed)].trajectory.space.mesh.h for n in h_levels]
    taus = [spec.horizon / N for N in tau_levels]
    h_fit = fit_rate(h_space, h_errors, theory=1.0, parameter='h', fixed=spec.horizon / N_fixed)
    tau_fit = fit_rate(taus, tau_errors, theory=time_rate_exponent(spec), parameter='tau',
                       fixed=cells[(n_fixed, tau_levels[0])].trajectory.space.mesh.h)
    logger.info(f"h-rate {h_fit.slope:.3f} (theory {h_fit.theory:g}), "
                f"tau-rate {tau_fit.slope:.3f} (theory {tau_fit.theory:g}, {time_reference} reference)")
    return h_fit, tau_fit


def self_reference(
    spec: ProblemSpec,
    coarse_levels: Sequence[Tuple[int, int]],
    reference_level: Tuple[int, int],
    options: Optional[StepOptions] = None,
    max_workers: int = 1,
) -> RateFit:
    """h-fit against a fine reference run, for problems without a closed form.

    Args:
        spec: Problem definition
        coarse_levels: (n, N) pairs
        reference_level: (n, N) at least 4 times finer in h and tau than every coarse level

    Raises:
        InsufficientLevels: With fewer than 3 coarse levels
        HarnessError: If the reference is not fine enough
    """
    coarse_levels = sorted(set((int(n), int(N)) for n, N in coarse_levels))
    if len(coarse_levels) < 3:
        raise InsufficientLevels(f"self-reference needs at least 3 coarse levels, got {len(coarse_levels)}")
    n_ref, N_ref = reference_level
    finest_n = max(n for n, _ in coarse_levels)
    finest_N = max(N for _, N in coarse_levels)
    if n_ref < REFERENCE_FACTOR * finest_n or N_ref < REFERENCE_FACTOR * finest_N:
        raise HarnessError(
            f"reference ({n_ref}, {N_ref}) must be {REFERENCE_FACTOR}x finer than ({finest_n}, {finest_N})"
        )

    cells = SweepRunner(spec, options, max_workers).run(list(coarse_levels) + [(n_ref, N_ref)])
    reference = cells[(n_ref, N_ref)].trajectory
    errors = [reference_error(cells[key].trajectory, reference) for key in coarse_levels]
    hs = [cells[key].trajectory.space.mesh.h for key in coarse_levels]
    fit = fit_rate(hs, errors, theory=1.0, parameter='h', fixed=spec.horizon / N_ref)
    logger.info(f"Self-reference rate {fit.slope:.3f} against n={n_ref}, N={N_ref}; monotone={fit.monotone}")
    return fit
