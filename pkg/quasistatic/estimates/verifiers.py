"""
A-priori estimates as measured diagnostics.

Single-trajectory verifiers return the measured series; the ``*_family``
functions compare them across refinement levels and produce EstimateReports.
"""
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from ..fem.linalg import solve_spd
from ..fem.norms import _lp_quadrature, gradient_lp, h1_semi, l2
from ..fem.operators import discrete_operator_L
from ..fem.space import FemSpace
from ..increment.functional import build_increment
from ..increment.models import StepOptions
from ..logger import get_logger
from ..mesh.poincare import smallest_eigenpair
from ..model.data import EllipticTensor, ProblemSpec
from ..rothe.models import Trajectory
from ..rothe.scheme import RotheScheme
from .models import EstimateError, EstimateReport, EstimateRow

logger = get_logger(__name__)

COERCIVITY_GROWTH = 0.20
TIME_SPREAD = 2.0
SPACE_SPREAD = 2.0
SOBOLEV_GROWTH = 0.10
HOLDER_SPREAD = 0.25
SOBOLEV_EXPONENT = 6
POLISH_SWEEPS = 20


def _spread(values: np.ndarray) -> float:
    """max / min of a positive series, 1 for all-zero series."""
    values = np.asarray(values, dtype=float)
    if np.all(values == 0):
        return 1.0
    if np.any(values <= 0):
        return float('inf')
    return float(values.max() / values.min())


def _h1(space: FemSpace, v: np.ndarray) -> float:
    return float(np.hypot(l2(space, v), h1_semi(space, v)))


def verify_coercivity(traj: Trajectory, spec: ProblemSpec) -> np.ndarray:
    """Ratios (||u_k||_q^q + ||grad u_k||^2) / (1 + ||f(t_k)||^2), one per grid time."""
    space = traj.space
    q = spec.energy.growth_exponent
    ratios = np.zeros(len(traj))
    for k, t in enumerate(traj.times):
        u = traj.values[k]
        lq = _lp_quadrature(space, u, q) ** q if np.any(u) else 0.0
        force = space.force_l2(spec.force, float(t))
        ratios[k] = (lq + h1_semi(space, u) ** 2) / (1.0 + force ** 2)
    return ratios


def _average_force_rate(space: FemSpace, spec: ProblemSpec, t0: float, t1: float) -> float:
    """Mean of ||f'(t)||_{L2} over [t0, t1]: Simpson on the analytic rate, else a difference quotient."""
    force = spec.force
    if force.derivative is not None:
        samples = [space.force_l2(force, t, derivative=True) for t in (t0, 0.5 * (t0 + t1), t1)]
        return (samples[0] + 4.0 * samples[1] + samples[2]) / 6.0
    values = space.vertex_values(lambda x: force.evaluate(t1, x) - force.evaluate(t0, x)).ravel()
    return float(np.sqrt(max(values @ (space._mass_full @ values), 0.0))) / (t1 - t0)


def verify_time_derivative_bound(traj: Trajectory, spec: ProblemSpec) -> Dict[str, float]:
    """max_k ||grad delta_k|| and the largest ratio against the time-derivative bound.

    ratio_k = ||grad delta_k|| (kappa - mu C_P^2) / (1 + avg ||f'|| over step k + ||f(t_{k-1})||)

    Raises:
        EstimateError: If kappa - mu C_P^2 is unknown or not positive
    """
    margin = spec.convexity_margin
    if margin is None or margin <= 0:
        raise EstimateError(f"the time-derivative bound needs kappa - mu C_P^2 > 0, got {margin}")
    space = traj.space
    quotients = traj.difference_quotients()
    gradients = np.array([h1_semi(space, quotients[k]) for k in range(len(traj))])
    ratios = np.zeros(len(traj))
    for k in range(1, len(traj)):
        t0, t1 = float(traj.times[k - 1]), float(traj.times[k])
        denominator = 1.0 + _average_force_rate(space, spec, t0, t1) + space.force_l2(spec.force, t0)
        ratios[k] = gradients[k] * margin / denominator
    return {'max_gradient': float(gradients.max()), 'max_ratio': float(ratios.max())}


def verify_space_bound(traj: Trajectory, spec: ProblemSpec) -> Dict[str, np.ndarray]:
    """Discrete space-regularity drivers per grid time.

    Returns:
        Mapping with ``ratio`` = ||L^h u_k|| / (1 + F^max{1,(q-1)/2}), ``ratio_q1`` with
        exponent q - 1 and ``gradient_l6`` = ||grad u_k||_{L6}, where F = max_k ||f(t_k)||_{L2}
    """
    space = traj.space
    q = spec.energy.growth_exponent
    F = max(space.force_l2(spec.force, float(t)) for t in traj.times)
    low = 1.0 + F ** max(1.0, (q - 1.0) / 2.0)
    high = 1.0 + F ** (q - 1.0)
    laplace = np.zeros(len(traj))
    gradient = np.zeros(len(traj))
    for k, t in enumerate(traj.times):
        xi = discrete_operator_L(space, traj.field(k), spec.tensor, float(t))
        laplace[k] = l2(space, xi.values)
        gradient[k] = gradient_lp(space, traj.values[k], SOBOLEV_EXPONENT)
    return {'ratio': laplace / low, 'ratio_q1': laplace / high, 'gradient_l6': gradient}


class _SobolevQuotient:
    """||grad z||_{L6} / ||L^h z||_{L2} with the lumped L^h, and its gradient in z."""

    def __init__(self, space: FemSpace, tensor: EllipticTensor, t: float):
        self.space = space
        self.stiffness = space.assemble_stiffness(tensor, t).matrix
        self.mass = space.assemble_mass().matrix
        self.inverse_weights = 1.0 / np.repeat(space.lumped_mass(), space.components)

    def _parts(self, z: np.ndarray):
        xi = -self.inverse_weights * (self.stiffness @ z)
        return gradient_lp(self.space, z, SOBOLEV_EXPONENT), float(np.sqrt(xi @ (self.mass @ xi))), xi

    def __call__(self, z: np.ndarray) -> float:
        z = z / np.linalg.norm(z)
        numerator, denominator, _ = self._parts(z)
        return numerator / denominator if denominator > 0 else 0.0

    def log_gradient(self, z: np.ndarray) -> np.ndarray:
        space = self.space
        numerator, denominator, xi = self._parts(z)
        grads = space.cell_gradients(z)
        size2 = np.sum(grads ** 2, axis=(1, 2))
        weight = space.mesh.volumes * size2 ** 2
        local = np.einsum('c,cid,cad->cai', weight, grads, space.gradients).ravel()
        full = np.zeros(space.mesh.num_vertices * space.components)
        np.add.at(full, space.cell_dofs.ravel(), local)
        d_numerator = full[space.interior_dofs] / numerator ** SOBOLEV_EXPONENT
        d_denominator = -(self.stiffness @ (self.inverse_weights * (self.mass @ xi))) / denominator ** 2
        return d_numerator - d_denominator


def _polish(quotient: _SobolevQuotient, z: np.ndarray, sweeps: int = POLISH_SWEEPS) -> float:
    """Gradient ascent on the log quotient with backtracking, renormalizing every step."""
    z = z / np.linalg.norm(z)
    best = quotient(z)
    step = 0.5
    for _ in range(sweeps):
        direction = quotient.log_gradient(z)
        size = np.linalg.norm(direction)
        if size == 0.0:
            break
        direction /= size
        for _ in range(30):
            candidate = z + step * direction
            candidate /= np.linalg.norm(candidate)
            value = quotient(candidate)
            if value > best:
                z, best = candidate, value
                step *= 2.0
                break
            step *= 0.5
        else:
            break
    return best


def verify_discrete_sobolev(space: FemSpace, tensor: EllipticTensor, t: float, trials: int = 200,
                            seed: int = 0, sweeps: int = POLISH_SWEEPS) -> float:
    """Maximized ||grad z||_{L6} / ||L^h z||_{L2} over random z = G^h(noise) and the lowest mode.

    The quotient is invariant under z -> alpha z; every candidate is normalized first.
    """
    if trials < 1:
        raise EstimateError(f"trials must be at least 1, got {trials}")
    quotient = _SobolevQuotient(space, tensor, t)
    rng = np.random.default_rng(seed)

    _, mode = smallest_eigenpair(quotient.stiffness, quotient.mass)
    candidates = [mode]
    for _ in range(trials):
        noise = rng.standard_normal(space.num_dofs)
        candidates.append(solve_spd(quotient.stiffness, quotient.mass @ noise))

    values = [quotient(z) for z in candidates]
    best = int(np.argmax(values))
    polished = _polish(quotient, candidates[best], sweeps)
    result = max(values[best], polished)
    logger.debug(f"Discrete Sobolev quotient on {space!r}: {result:.6g} (best raw {values[best]:.6g})")
    return float(result)


def _vertex_history(traj: Trajectory) -> np.ndarray:
    space = traj.space
    history = np.zeros((len(traj), space.mesh.num_vertices, space.components))
    history[:, space.interior] = traj.values.reshape(len(traj), space.num_nodes, space.components)
    return history


def _space_time_values(traj: Trajectory, times: np.ndarray, points: np.ndarray) -> np.ndarray:
    space = traj.space
    history = _vertex_history(traj)
    cells, bary = space.mesh.locate(points)
    k = np.clip(np.searchsorted(traj.times, times, side='left'), 1, len(traj) - 1)
    theta = np.clip((times - traj.times[k - 1]) / (traj.times[k] - traj.times[k - 1]), 0.0, 1.0)
    vertices = space.mesh.cells[cells]
    before = np.einsum('pa,pai->pi', bary, history[k - 1][np.arange(len(k))[:, None], vertices])
    after = np.einsum('pa,pai->pi', bary, history[k][np.arange(len(k))[:, None], vertices])
    return (1.0 - theta)[:, None] * before + theta[:, None] * after


def holder_seminorm(traj: Trajectory, gamma: float, samples: int = 10000) -> float:
    """sup |u(t,x) - u(s,y)| / (|t-s| + |x-y|)^gamma over Halton pairs of space-time points."""
    if samples < 2:
        raise EstimateError(f"samples must be at least 2, got {samples}")
    if not 0 < gamma <= 1:
        raise EstimateError(f"gamma must lie in (0, 1], got {gamma}")
    if len(traj) < 2:
        return 0.0
    d = traj.space.dimension
    pairs = qmc.Halton(d=2 * (d + 1), scramble=False).random(samples)
    t = pairs[:, 0] * traj.horizon
    s = pairs[:, d + 1] * traj.horizon
    x = pairs[:, 1:d + 1]
    y = pairs[:, d + 2:]
    difference = np.linalg.norm(_space_time_values(traj, t, x) - _space_time_values(traj, s, y), axis=1)
    distance = np.abs(t - s) + np.linalg.norm(x - y, axis=1)
    valid = distance > 0
    return float(np.max(difference[valid] / distance[valid] ** gamma, initial=0.0))


def scalar_holder_seminorm(func: Callable[[float], float], horizon: float, gamma: float,
                           samples: int = 10000) -> float:
    """Hoelder seminorm in time of a scalar function on [0, T] over Halton pairs."""
    if samples < 2:
        raise EstimateError(f"samples must be at least 2, got {samples}")
    pairs = qmc.Halton(d=2, scramble=False).random(samples) * horizon
    values = np.array([[func(t), func(s)] for t, s in pairs])
    distance = np.abs(pairs[:, 0] - pairs[:, 1])
    valid = distance > 0
    return float(np.max(np.abs(values[valid, 0] - values[valid, 1]) / distance[valid] ** gamma, initial=0.0))


def uniqueness_probe(spec: ProblemSpec, space: FemSpace, N: int, perturbation: float,
                     options: Optional[StepOptions] = None, seed: int = 0,
                     enforce_admissibility: bool = True) -> float:
    """Max over k of the H1 distance between a plain run and a run with noisy warm starts."""
    if perturbation < 0:
        raise EstimateError(f"perturbation must be nonnegative, got {perturbation}")
    scheme = RotheScheme(spec, space, options, enforce_admissibility=enforce_admissibility)
    baseline = scheme.run(N)
    rng = np.random.default_rng(seed)

    def warm_start(k: int, previous: np.ndarray) -> np.ndarray:
        return previous + perturbation * rng.standard_normal(previous.size)

    perturbed = scheme.run(N, warm_start=warm_start)
    divergence = max(_h1(space, a - b) for a, b in zip(baseline.values, perturbed.values))
    logger.info(f"Uniqueness probe (perturbation {perturbation:g}): divergence {divergence:.3e}")
    return float(divergence)


def strong_inequality_residual(traj: Trajectory, spec: ProblemSpec) -> float:
    """Largest Euler-Lagrange violation along the trajectory, divided by tau."""
    if traj.steps == 0:
        return 0.0
    worst = 0.0
    for k in range(1, len(traj)):
        problem = build_increment(traj.space, traj.values[k - 1], float(traj.times[k]), spec)
        worst = max(worst, problem.el_violation(traj.values[k]))
    return worst / traj.tau


def _rows(measured: Sequence[float], trend: Sequence[float], passed: bool,
          hs: Sequence[float], taus: Sequence[float]) -> List[EstimateRow]:
    return [EstimateRow(level=i, h=float(h), tau=float(tau), measured=float(m), bound_or_trend=float(b), passed=passed)
            for i, (h, tau, m, b) in enumerate(zip(hs, taus, measured, trend))]


def _levels(trajs: Sequence[Trajectory]):
    if len(trajs) < 1:
        raise EstimateError("a family needs at least one trajectory")
    return [traj.space.mesh.h for traj in trajs], [traj.tau for traj in trajs]


def coercivity_family(trajs: Sequence[Trajectory], spec: ProblemSpec,
                      growth: float = COERCIVITY_GROWTH) -> EstimateReport:
    """PASS iff the maximal coercivity ratio grows by less than ``growth`` from coarsest to finest."""
    hs, taus = _levels(trajs)
    maxima = np.array([verify_coercivity(traj, spec).max() for traj in trajs])
    base = maxima[0]
    trend = np.zeros_like(maxima) if base == 0 else maxima / base - 1.0
    passed = bool(maxima[-1] <= maxima[0] * (1.0 + growth)) if base > 0 else bool(np.all(maxima == 0))
    return EstimateReport('coercivity', _rows(maxima, np.abs(trend), passed, hs, taus), passed=passed,
                          details={'growth_limit': growth})


def time_derivative_family(trajs: Sequence[Trajectory], spec: ProblemSpec,
                           factor: float = TIME_SPREAD) -> EstimateReport:
    """PASS iff max_k ||grad delta_k|| varies by at most ``factor`` across levels."""
    hs, taus = _levels(trajs)
    measured = [verify_time_derivative_bound(traj, spec) for traj in trajs]
    gradients = np.array([m['max_gradient'] for m in measured])
    spread = _spread(gradients)
    passed = spread <= factor
    return EstimateReport('time', _rows(gradients, [m['max_ratio'] for m in measured], passed, hs, taus),
                          passed=passed, details={'spread': spread, 'factor': factor})


def space_family(trajs: Sequence[Trajectory], spec: ProblemSpec, factor: float = SPACE_SPREAD) -> EstimateReport:
    """Report-only trend of the discrete space drivers across levels."""
    hs, taus = _levels(trajs)
    measured = [verify_space_bound(traj, spec) for traj in trajs]
    ratios = np.array([m['ratio'].max() for m in measured])
    spread = _spread(ratios)
    passed = spread <= factor
    return EstimateReport(
        'space',
        _rows(ratios, [m['ratio_q1'].max() for m in measured], passed, hs, taus),
        passed=passed,
        asserted=False,
        details={'spread': spread, 'gradient_l6': [float(m['gradient_l6'].max()) for m in measured]},
    )


def sobolev_family(spaces: Sequence[FemSpace], tensor: EllipticTensor, t: float = 0.0, trials: int = 200,
                   growth: float = SOBOLEV_GROWTH, seed: int = 0) -> EstimateReport:
    """PASS iff the maximized Sobolev quotient grows by at most ``growth`` per refinement (>= 3 levels)."""
    if len(spaces) < 3:
        raise EstimateError(f"the discrete Sobolev check needs at least 3 levels, got {len(spaces)}")
    ratios = np.array([verify_discrete_sobolev(space, tensor, t, trials, seed) for space in spaces])
    steps = ratios[1:] / ratios[:-1]
    passed = bool(np.all(steps <= 1.0 + growth))
    trend = np.concatenate([[1.0], steps])
    hs = [space.mesh.h for space in spaces]
    return EstimateReport('sobolev', _rows(ratios, trend, passed, hs, [0.0] * len(spaces)), passed=passed,
                          details={'growth_limit': growth})


def holder_family(trajs: Sequence[Trajectory], gamma: float = 0.25, samples: int = 10000,
                  spread: float = HOLDER_SPREAD) -> EstimateReport:
    """PASS iff the Hoelder seminorm estimates stay within a relative ``spread`` of each other."""
    hs, taus = _levels(trajs)
    values = np.array([holder_seminorm(traj, gamma, samples) for traj in trajs])
    measured_spread = _spread(values) - 1.0
    passed = measured_spread <= spread
    return EstimateReport('holder', _rows(values, [measured_spread] * len(values), passed, hs, taus),
                          passed=passed, details={'gamma': gamma, 'samples': samples})


def uniqueness_report(spec: ProblemSpec, space: FemSpace, N: int, perturbation: float,
                      options: Optional[StepOptions] = None, limit: Optional[float] = None) -> EstimateReport:
    """PASS iff the uniqueness probe diverges by at most ``limit`` (default max(100 tol, 1e-8))."""
    options = options or StepOptions()
    limit = max(100.0 * options.tol, 1e-8) if limit is None else limit
    divergence = uniqueness_probe(spec, space, N, perturbation, options)
    passed = divergence <= limit
    row = EstimateRow(level=0, h=space.mesh.h, tau=spec.horizon / N, measured=divergence,
                      bound_or_trend=limit, passed=passed)
    return EstimateReport('uniqueness', [row], passed=passed, details={'perturbation': perturbation})
