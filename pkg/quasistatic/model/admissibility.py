"""
Sampled verification of the standing assumptions on a problem definition.

Only the mild convexity condition mu * C_P^2 < kappa gates a run; every other
check is reported with its measured margin and logged when it fails.
"""
from typing import Callable, List, Optional

import numpy as np

from ..logger import get_logger
from .data import ProblemSpec
from .models import AdmissibilityReport, AssumptionCheck, ModelError, NonFiniteEvaluation

logger = get_logger(__name__)

DEFAULT_BOX = 10.0
FD_STEP = 1e-5
FD_TOLERANCE = 1e-6
FORCE_FD_STEP = 1e-5
FORCE_FD_TOLERANCE = 1e-4


def _ball(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal((count, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / dim)
    return direction * r[:, None]


def _finite(name: str, values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NonFiniteEvaluation(f"{name} produced NaN/inf on the sample set")
    return values


def _check(name: str, slack: np.ndarray, detail: str, gating: bool = False) -> AssumptionCheck:
    margin = float(np.min(slack)) if np.size(slack) else 0.0
    return AssumptionCheck(name=name, passed=margin >= 0.0, margin=margin, detail=detail, gating=gating)


def _dissipation_checks(spec: ProblemSpec, rng: np.random.Generator, box: float) -> List[AssumptionCheck]:
    m = spec.components
    R = spec.dissipation.evaluate
    count = 1000
    a = _ball(rng, count, m, box)
    b = _ball(rng, count, m, box)
    alpha = box * rng.random(count)

    Ra = _finite('R1', R(a))
    Rb = _finite('R1', R(b))
    scale = 1.0 + np.abs(Ra) + np.abs(Rb)

    homogeneity = 1e-12 * (1.0 + alpha * np.abs(Ra)) - np.abs(R(alpha[:, None] * a) - alpha * Ra)
    subadditivity = Ra + Rb - R(a + b) + 1e-12 * scale
    nonneg = np.concatenate([Ra, -np.abs(R(np.zeros((1, m))))])

    lam = rng.random(count) + 1e-3
    pa = spec.dissipation.prox(a, lam)
    pb = spec.dissipation.prox(b, lam)
    nonexpansive = np.linalg.norm(a - b, axis=1) - np.linalg.norm(pa - pb, axis=1) + 1e-12 * box
    # lam R(z) >= lam R(p) + <x - p, z - p> for every z
    optimality = (lam * R(b) - lam * R(pa) - np.sum((a - pa) * (b - pa), axis=1)
                  + 1e-10 * (1.0 + box ** 2))

    return [
        _check('A2.homogeneity', homogeneity, 'R1(alpha w) = alpha R1(w)'),
        _check('A2.subadditivity', subadditivity, 'R1(a+b) <= R1(a) + R1(b)'),
        _check('A2.nonnegativity', nonneg, 'R1 >= 0 and R1(0) = 0'),
        _check('A2.prox_nonexpansive', nonexpansive, '|prox(x)-prox(y)| <= |x-y|'),
        _check('A2.prox_optimality', optimality, 'prox variational inequality'),
    ]


def _energy_checks(spec: ProblemSpec, rng: np.random.Generator, box: float, samples: int) -> List[AssumptionCheck]:
    energy = spec.energy
    m = spec.components
    C = energy.growth_constant
    q = energy.growth_exponent

    v = _ball(rng, samples, m, box)
    w = _ball(rng, samples, m, box)
    r = np.linalg.norm(v, axis=1)

    W = _finite('W0', energy.value(v))
    Dv = _finite('DW0', energy.gradient(v))
    Dw = _finite('DW0', energy.gradient(w))

    growth = np.minimum(W - (r ** q / C - C), C * (r ** q + 1.0) - W)
    gradient_growth = C * (1.0 + r ** (q - 1.0)) - np.linalg.norm(Dv, axis=1)
    diff = v - w
    monotone = (np.sum((Dv - Dw) * diff, axis=1) + energy.mu * np.sum(diff * diff, axis=1)
                + 1e-9 * (1.0 + np.linalg.norm(Dv, axis=1) + np.linalg.norm(Dw, axis=1)) * box)

    fd_points = v[:1000]
    fd = np.empty_like(fd_points)
    for c in range(m):
        shift = np.zeros(m)
        shift[c] = FD_STEP
        fd[:, c] = (energy.value(fd_points + shift) - energy.value(fd_points - shift)) / (2.0 * FD_STEP)
    exact = energy.gradient(fd_points)
    relative = np.linalg.norm(fd - exact, axis=1) / np.maximum(1.0, np.linalg.norm(exact, axis=1))
    consistency = FD_TOLERANCE - _finite('finite differences', relative)

    return [
        _check('A3.growth', growth, 'C^-1 |v|^q - C <= W0(v) <= C(|v|^q + 1)'),
        _check('A3.gradient_growth', gradient_growth, '|DW0(v)| <= C(1 + |v|^(q-1))'),
        _check('A3.semi_monotonicity', monotone, '(DW0(v)-DW0(w)).(v-w) >= -mu |v-w|^2'),
        _check('A3.gradient_consistency', consistency, 'central differences match DW0'),
    ]


def _tensor_checks(spec: ProblemSpec, rng: np.random.Generator) -> List[AssumptionCheck]:
    tensor = spec.tensor
    m, d = spec.components, spec.dimension
    symmetry, ellipticity = [], []
    for t in np.linspace(0.0, spec.horizon, 11):
        x = rng.random((50, d))
        A = _finite('A', np.asarray(tensor.evaluate(t, x), dtype=float))
        transposed = np.transpose(A, (0, 3, 4, 1, 2))
        scale = 1.0 + np.max(np.abs(A))
        symmetry.append(1e-12 * scale - np.max(np.abs(A - transposed), axis=(1, 2, 3, 4)))
        matrices = 0.5 * (A + transposed).reshape(-1, m * d, m * d)
        ellipticity.append(np.linalg.eigvalsh(matrices)[:, 0] - tensor.kappa + 1e-12 * scale)
    return [
        _check('A4.symmetry', np.concatenate(symmetry), 'A_ij^ab = A_ji^ba'),
        _check('A4.ellipticity', np.concatenate(ellipticity), 'xi:A:xi >= kappa |xi|^2', gating=True),
    ]


def _force_checks(spec: ProblemSpec, rng: np.random.Generator) -> List[AssumptionCheck]:
    force = spec.force
    if force.derivative is None:
        return []
    slack = []
    for t in np.linspace(0.1 * spec.horizon, 0.9 * spec.horizon, 9):
        x = rng.random((50, spec.dimension))
        f0 = force.evaluate(t, x)
        fd = (force.evaluate(t + FORCE_FD_STEP, x) - f0) / FORCE_FD_STEP
        exact = _finite('df/dt', force.derivative(t, x))
        denominator = np.maximum(np.abs(exact), 1e-6 * (1.0 + np.abs(f0)))
        slack.append((FORCE_FD_TOLERANCE - np.abs(fd - exact) / denominator).ravel())
    return [_check('A5.time_derivative', np.concatenate(slack), 'difference quotient matches df/dt')]


def check_admissibility(
    spec: ProblemSpec,
    poincare_constant: Optional[float] = None,
    samples: int = 10_000,
    box: float = DEFAULT_BOX,
    seed: int = 0,
) -> AdmissibilityReport:
    """Verify the standing assumptions of a problem by sampling.

    Args:
        spec: Problem definition
        poincare_constant: C_P for the target mesh family; falls back to spec.poincare_constant
        samples: Number of sample pairs for the energy checks
        box: Sampling radius |v| <= box
        seed: Seed of the sampling generator

    Returns:
        Report listing every check with its margin; mild convexity and ellipticity are gating

    Raises:
        ModelError: If no Poincare constant is available
        NonFiniteEvaluation: If a density evaluates to NaN or infinity
    """
    c_p = poincare_constant if poincare_constant is not None else spec.poincare_constant
    if c_p is None:
        raise ModelError("Poincare constant unknown: compute it on the target mesh family first")

    rng = np.random.default_rng(seed)
    report = AdmissibilityReport(kappa=spec.kappa, mu=spec.mu, poincare_constant=float(c_p))

    sections: List[Callable[[], List[AssumptionCheck]]] = [
        lambda: _dissipation_checks(spec, rng, box),
        lambda: _energy_checks(spec, rng, box, samples),
        lambda: _tensor_checks(spec, rng),
        lambda: _force_checks(spec, rng),
    ]
    for section in sections:
        report.checks.extend(section())

    margin = report.convexity_margin
    report.checks.append(AssumptionCheck(
        name='muCP',
        passed=margin > 0.0,
        margin=margin,
        detail=f"kappa - mu C_P^2 = {spec.kappa:.6g} - {spec.mu:.6g} * {c_p:.6g}^2",
        gating=True,
    ))

    for check in report.failures:
        if check.gating:
            logger.error(f"Assumption {check.name} failed: {check.detail} (margin {check.margin:.3e})")
        else:
            logger.warning(f"Assumption {check.name} failed: {check.detail} (margin {check.margin:.3e})")
    logger.info(f"Admissibility of '{spec.name}': convexity margin {margin:.6g}, "
                f"{len(report.failures)} failing check(s)")
    return report
