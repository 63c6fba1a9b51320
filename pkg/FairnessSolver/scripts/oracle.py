"""
Independent checks for the analytic solvers.

    grid_best_fair           exhaustive (T_1, T_2) grid with a certified error bound
    monte_carlo              agent-level simulation of crime and conviction
    integrated_disincentive  Simpson integral of f_cc - f_nc above T*

Monte Carlo draws, for each agent, the composite benefit b from the
outside option by inverse transform (P(b >= x) = H(x)), commits crime iff
theta * Delta <= b, draws the signal from the matching distribution and
convicts iff inspected and s >= T. Work is split into chunks seeded by
(seed, group, chunk) so results do not depend on the worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import integrate

from scripts.errors import DomainError, InfeasibleError
from scripts.inspection import InspectionProfile
from scripts.optimize import CONFIG as OPTIMIZE_CONFIG
from scripts.optimize import FairSolution
from scripts.policy import FairnessNotion, ThresholdPolicy, group_metrics, metric_arrays
from scripts.population import Group, Scenario
from scripts.signals import SignalHypothesis, SignalStructure, max_disincentive

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'min_resolution': 64,
    'chunk_size': 2 ** 18,
    'band_sigmas': 4.0,
    'simpson_points': 20001,
    'simpson_tail': 1e-12,
}

_STATISTIC_KEYS = {
    FairnessNotion.FPR: 'fpr',
    FairnessNotion.FNR: 'fnr',
    FairnessNotion.PPV: 'ppv',
    FairnessNotion.DELTA: 'delta',
    FairnessNotion.CR: 'crime_rate',
}

COUNT_KEYS = (
    'criminal_convicted',
    'criminal_acquitted',
    'innocent_convicted',
    'innocent_acquitted',
    'criminal_inspected',
    'innocent_inspected',
)


# =============================================================================
# BRUTE-FORCE GRID
# =============================================================================

@dataclass(frozen=True)
class GridResult:
    solution: FairSolution
    bound: float
    tolerance: float
    feasible_pairs: int


def grid_best_fair(scenario: Scenario, notion, resolution: int = 256) -> GridResult:
    """
    Crime-minimal threshold pair on a resolution x resolution grid.

    Each axis spans its group's 0.0005-0.9995 quantiles. A pair is kept when
    the notion gap is at most half the largest step of group 2's statistic
    between neighbouring grid points. The certified bound is
    2 (L_1 h_1 + L_2 h_2), L_g the largest sampled slope of N_g CR_g.

    Raises:
        DomainError: resolution below 64
        InfeasibleError: no grid pair meets the tolerance
    """
    if resolution < CONFIG['min_resolution']:
        raise DomainError(f"resolution must be >= {CONFIG['min_resolution']}, got {resolution}")
    notion = FairnessNotion.parse(notion)
    q_lo, q_hi = OPTIMIZE_CONFIG['outer_quantiles']

    axes, arrays = [], []
    for group in scenario.groups:
        lo = float(group.signal.ppf(q_lo, SignalHypothesis.INNOCENT))
        hi = float(group.signal.ppf(q_hi, SignalHypothesis.CRIME))
        T = np.linspace(lo, hi, resolution)
        axes.append(T)
        arrays.append(metric_arrays(group, T))

    c1 = scenario.groups[0].population * arrays[0]['crime_rate']
    c2 = scenario.groups[1].population * arrays[1]['crime_rate']
    crime = c1[:, None] + c2[None, :]

    if notion is None:
        feasible = np.ones_like(crime, dtype=bool)
        gap = np.zeros_like(crime)
        tol = 0.0
    else:
        key = _STATISTIC_KEYS[notion]
        s1, s2 = arrays[0][key], arrays[1][key]
        gap = np.abs(s1[:, None] - s2[None, :])
        gap = np.where(np.isfinite(gap), gap, np.inf)
        steps = np.abs(np.diff(s2))
        tol = 0.5 * float(np.nanmax(steps)) if np.any(np.isfinite(steps)) else 0.0
        feasible = gap <= tol

    count = int(np.count_nonzero(feasible))
    if count == 0:
        raise InfeasibleError("no grid pair meets the constraint tolerance", notion.value if notion else None)

    masked = np.where(feasible, crime, np.inf)
    i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
    bound = 2.0 * (float(np.max(np.abs(np.diff(c1)))) + float(np.max(np.abs(np.diff(c2)))))
    solution = FairSolution(
        policy=ThresholdPolicy((float(axes[0][i]), float(axes[1][j]))),
        crime=float(crime[i, j]),
        notion=notion,
        residual=float(gap[i, j]),
    )
    logger.debug(
        f"[ORACLE] grid {resolution}^2 notion={notion.value if notion else 'none'} "
        f"crime={solution.crime:.8g} bound={bound:.3g} feasible={count}"
    )
    return GridResult(solution=solution, bound=bound, tolerance=tol, feasible_pairs=count)


# =============================================================================
# MONTE CARLO
# =============================================================================

@dataclass(frozen=True)
class EmpiricalMetrics:
    crime_rate: float
    fpr: Optional[float]
    fnr: Optional[float]
    ppv: Optional[float]
    counts: Dict[str, int]
    n: int
    seed: int

    @classmethod
    def from_counts(cls, counts: Dict[str, int], n: int, seed: int) -> 'EmpiricalMetrics':
        cells = counts['criminal_convicted'] + counts['criminal_acquitted'] \
            + counts['innocent_convicted'] + counts['innocent_acquitted']
        if cells != n:
            raise DomainError(f"cell counts sum to {cells}, expected {n}")
        criminals = counts['criminal_convicted'] + counts['criminal_acquitted']
        convicted = counts['criminal_convicted'] + counts['innocent_convicted']

        def ratio(num: int, den: int) -> Optional[float]:
            return num / den if den > 0 else None

        return cls(
            crime_rate=criminals / n,
            fpr=ratio(counts['innocent_convicted'], counts['innocent_inspected']),
            fnr=ratio(counts['criminal_inspected'] - counts['criminal_convicted'], counts['criminal_inspected']),
            ppv=ratio(counts['criminal_convicted'], convicted),
            counts=dict(counts),
            n=n,
            seed=seed,
        )

    def to_dict(self) -> Dict:
        return {
            'crime_rate': self.crime_rate,
            'fpr': self.fpr,
            'fnr': self.fnr,
            'ppv': self.ppv,
            'counts': self.counts,
            'n': self.n,
            'seed': self.seed,
        }


def _simulate_chunk(
    group: Group,
    group_index: int,
    threshold: float,
    disincentive: float,
    theta: float,
    seed: int,
    chunk: int,
    size: int,
) -> np.ndarray:
    rng = np.random.default_rng([seed, group_index, chunk])
    u = rng.random((3, size))
    benefit = np.asarray(group.outside_option.sample(u[0]))
    crime = theta * disincentive <= benefit

    signal: SignalStructure = group.signal
    eta = np.asarray(signal.base.ppf(u[1]))
    s = signal.mu + signal.sigma * eta + signal.crime_shift * crime
    inspected = u[2] < theta
    convicted = inspected & (s >= threshold)

    return np.array([
        np.count_nonzero(crime & convicted),
        np.count_nonzero(crime & ~convicted),
        np.count_nonzero(~crime & convicted),
        np.count_nonzero(~crime & ~convicted),
        np.count_nonzero(crime & inspected),
        np.count_nonzero(~crime & inspected),
    ], dtype=np.int64)


def monte_carlo(
    scenario: Scenario,
    policy: ThresholdPolicy,
    n: int,
    seed: int,
    profile: Optional[InspectionProfile] = None,
    workers: int = 1,
    chunk_size: int = None,
) -> Tuple[EmpiricalMetrics, EmpiricalMetrics]:
    """
    Simulate n agents per group under a threshold policy.

    Args:
        profile: inspection intensities; everyone is inspected when absent
        workers: thread count; results are identical for any value
        chunk_size: agents per deterministic chunk

    Returns:
        One EmpiricalMetrics per group
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    chunk_size = chunk_size or CONFIG['chunk_size']
    sizes = [chunk_size] * (n // chunk_size) + ([n % chunk_size] if n % chunk_size else [])
    metrics = group_metrics(scenario, policy)

    results = []
    for g, group in enumerate(scenario.groups):
        theta = 1.0 if profile is None else profile[g]
        jobs = [
            (group, g, policy[g], metrics[g].delta, theta, seed, k, size)
            for k, size in enumerate(sizes)
        ]
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            partials = list(pool.map(lambda job: _simulate_chunk(*job), jobs))
        totals = np.sum(partials, axis=0)
        counts = {key: int(v) for key, v in zip(COUNT_KEYS, totals)}
        results.append(EmpiricalMetrics.from_counts(counts, n, seed))
        logger.debug(f"[MC] group {group.name} seed={seed} n={n} counts={counts}")
    return results[0], results[1]


def analytic_bands(
    scenario: Scenario,
    policy: ThresholdPolicy,
    empirical: Tuple[EmpiricalMetrics, EmpiricalMetrics],
    profile: Optional[InspectionProfile] = None,
) -> Tuple[Dict[str, Tuple[float, float, Optional[float]]], ...]:
    """
    Per group and metric: (analytic value, band half-width, empirical value).

    Bands are 4 binomial standard errors over the relevant denominator;
    FPR/FNR are conditional on inspection.
    """
    k = CONFIG['band_sigmas']
    out = []
    for g, (group, emp) in enumerate(zip(scenario.groups, empirical)):
        theta = 1.0 if profile is None else profile[g]
        delta = group_metrics(scenario, policy)[g].delta
        expected = {
            'crime_rate': float(group.outside_option(theta * delta)),
            'fpr': float(group.signal.sf(policy[g], SignalHypothesis.INNOCENT)),
            'fnr': float(group.signal.cdf(policy[g], SignalHypothesis.CRIME)),
        }
        denominators = {
            'crime_rate': emp.n,
            'fpr': emp.counts['innocent_inspected'],
            'fnr': emp.counts['criminal_inspected'],
        }
        bands = {}
        for name, p in expected.items():
            den = denominators[name]
            width = k * np.sqrt(p * (1.0 - p) / den) if den > 0 else np.inf
            bands[name] = (p, float(width), getattr(emp, name))
        out.append(bands)
    return tuple(out)


# =============================================================================
# NUMERICAL INTEGRATION
# =============================================================================

def integrated_disincentive(dist: SignalStructure, points: int = None) -> float:
    """Simpson integral of f_cc - f_nc over {f_cc > f_nc} = (T*, inf)."""
    points = points or CONFIG['simpson_points']
    t_star = max_disincentive(dist).argmax_threshold
    q = 1.0 - CONFIG['simpson_tail']
    hi = max(float(dist.ppf(q, SignalHypothesis.CRIME)), float(dist.ppf(q, SignalHypothesis.INNOCENT)))
    s = np.linspace(t_star, hi, points)
    values = np.asarray(dist.pdf(s, SignalHypothesis.CRIME)) - np.asarray(dist.pdf(s, SignalHypothesis.INNOCENT))
    return float(integrate.simpson(values, x=s))
