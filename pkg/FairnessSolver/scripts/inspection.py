"""
Policing game with limited inspection capacity.

An adjudicator fixes thresholds; police inspect group g with intensity
theta_g subject to N_1 theta_1 + N_2 theta_2 = S. An inspected agent faces
disincentive theta_g * Delta_g, so the crime rate is H_g(theta_g Delta_g).

    first best   intensities chosen to minimize total crime
    second best  self-interested police equalize crime rates across groups

Both set thresholds at T*_g; they differ only in the intensities.

Usage:
    from scripts.inspection import first_best, second_best, intensity_extremality_check

    fb = first_best(scenario)
    sb = second_best(scenario)
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from scripts.errors import HypothesisError, InvariantError, NonInteriorEquilibrium
from scripts.numerics import bracketed_root, grid_then_refine
from scripts.policy import ThresholdPolicy, indicator_policy
from scripts.population import Scenario, SurvivorFamily, same_location_family, survivor_curvature
from scripts.signals import SignalHypothesis, delta_of_threshold, max_disincentive

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'first_best_grid': 1024,
    'extremality_grid': 1000,
    'golden_tol': 1e-12,
    'theta_xtol': 1e-15,
    'threshold_grid': 1024,
    'threshold_quantiles': (0.0005, 0.9995),
    'search_band': 1e-6,
    'search_crime_tol': 1e-9,
    'equal_max_disincentive': 1e-10,
    'conditional_band': 1e-9,
    'extremum_rel_tol': 1e-9,
}


@dataclass(frozen=True)
class InspectionProfile:
    intensities: Tuple[float, float]

    def __post_init__(self):
        values = tuple(float(t) for t in self.intensities)
        object.__setattr__(self, 'intensities', values)
        bad = [t for t in values if not 0.0 <= t <= 1.0]
        if bad:
            raise InvariantError(f"inspection intensities must lie in [0, 1], got {values}")

    def __getitem__(self, index: int) -> float:
        return self.intensities[index]


@dataclass(frozen=True)
class GameSolution:
    policy: ThresholdPolicy
    profile: InspectionProfile
    crime: float
    conditional_metrics: Tuple[Tuple[float, float], Tuple[float, float]]
    interior: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'thresholds': list(self.policy.thresholds),
            'intensities': list(self.profile.intensities),
            'crime': self.crime,
            'ctpr': [c[0] for c in self.conditional_metrics],
            'cfpr': [c[1] for c in self.conditional_metrics],
            'interior': self.interior,
        }


@dataclass
class ExtremalityReport:
    curvature: str
    equilibrium: InspectionProfile
    equilibrium_crime: float
    grid_min: float
    grid_max: float
    grid_bound: float
    local_second_derivative: float
    attains_min: bool
    attains_max: bool
    verified: bool

    def to_dict(self) -> Dict[str, Any]:
        out = dict(self.__dict__)
        out['equilibrium'] = list(self.equilibrium.intensities)
        return out


# =============================================================================
# CAPACITY SEGMENT
# =============================================================================

def _capacity(scenario: Scenario) -> float:
    if scenario.inspection_capacity is None:
        raise HypothesisError("scenario has no inspection capacity")
    if scenario.groups[0].population <= 0 or scenario.groups[1].population <= 0:
        raise HypothesisError("inspection game needs positive populations")
    return float(scenario.inspection_capacity)


def capacity_segment(scenario: Scenario) -> Tuple[float, float]:
    """Feasible theta_1 interval when capacity binds."""
    S = _capacity(scenario)
    N1, N2 = scenario.populations
    return max(0.0, (S - N2) / N1), min(1.0, S / N1)


def _partner_intensity(scenario: Scenario, theta1):
    N1, N2 = scenario.populations
    return (scenario.inspection_capacity - N1 * np.asarray(theta1, dtype=float)) / N2


def crime_along_capacity(scenario: Scenario, deltas: Sequence[float], theta1):
    """Total crime N_1 H_1(theta_1 D_1) + N_2 H_2(theta_2 D_2) on the binding segment."""
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = _partner_intensity(scenario, theta1)
    g1, g2 = scenario.groups
    crime = (
        g1.population * np.asarray(g1.outside_option(theta1 * deltas[0]))
        + g2.population * np.asarray(g2.outside_option(theta2 * deltas[1]))
    )
    return float(crime) if np.ndim(crime) == 0 else crime


def _max_disincentives(scenario: Scenario) -> Tuple[float, float]:
    return tuple(max_disincentive(g.signal).upper for g in scenario.groups)


def _conditional_metrics(scenario: Scenario, policy: ThresholdPolicy):
    return tuple(
        (
            float(g.signal.sf(T, SignalHypothesis.CRIME)),
            float(g.signal.sf(T, SignalHypothesis.INNOCENT)),
        )
        for g, T in zip(scenario.groups, policy.thresholds)
    )


def _is_interior(profile: InspectionProfile) -> bool:
    return all(0.0 < t < 1.0 for t in profile.intensities)


# =============================================================================
# OPERATIONS
# =============================================================================

def equilibrium_intensities(scenario: Scenario, deltas: Sequence[float]) -> InspectionProfile:
    """
    Crime-rate equalizing intensities with binding capacity.

    Solves H_1(theta_1 D_1) = H_2(theta_2 D_2), theta_2 = (S - N_1 theta_1) / N_2,
    by bracketing the strictly decreasing gap on the capacity segment.

    Raises:
        NonInteriorEquilibrium: the gap does not change sign strictly inside
            the segment
    """
    lo, hi = capacity_segment(scenario)
    H1 = scenario.groups[0].outside_option
    H2 = scenario.groups[1].outside_option
    if not all(d > 0 for d in deltas):
        raise HypothesisError(f"disincentives must be positive, got {tuple(deltas)}")

    def gap(theta1: float) -> float:
        theta2 = float(_partner_intensity(scenario, theta1))
        return float(H1(theta1 * deltas[0])) - float(H2(theta2 * deltas[1]))

    g_lo, g_hi = gap(lo), gap(hi)
    if not (g_lo > 0.0 > g_hi):
        raise NonInteriorEquilibrium(
            f"crime-rate gap keeps its sign on theta_1 in [{lo:.6g}, {hi:.6g}] "
            f"(gap {g_lo:.6g} -> {g_hi:.6g}); conditional rates undefined for the ignored group"
        )
    theta1 = bracketed_root(gap, lo, hi, xtol=CONFIG['theta_xtol'])
    theta2 = float(_partner_intensity(scenario, theta1))
    if not (0.0 < theta1 < 1.0 and 0.0 < theta2 < 1.0):
        raise NonInteriorEquilibrium(f"equilibrium at a corner: theta=({theta1:.6g}, {theta2:.6g})")
    logger.debug(f"[EQUILIBRIUM] theta=({theta1:.12g}, {theta2:.12g})")
    return InspectionProfile((theta1, theta2))


def first_best(scenario: Scenario) -> GameSolution:
    """Thresholds T*_g and crime-minimizing intensities on the binding segment."""
    deltas = _max_disincentives(scenario)
    lo, hi = capacity_segment(scenario)
    theta1, crime = grid_then_refine(
        lambda t: crime_along_capacity(scenario, deltas, t),
        lo, hi, CONFIG['first_best_grid'], CONFIG['golden_tol'],
    )
    profile = InspectionProfile((theta1, float(_partner_intensity(scenario, theta1))))
    policy = indicator_policy(scenario)
    logger.info(f"[INSPECT] first best theta={profile.intensities} crime={crime:.10g}")
    return GameSolution(policy, profile, float(crime), _conditional_metrics(scenario, policy), _is_interior(profile))


def second_best(scenario: Scenario) -> GameSolution:
    """Thresholds T*_g with the police equilibrium intensities."""
    deltas = _max_disincentives(scenario)
    profile = equilibrium_intensities(scenario, deltas)
    crime = crime_along_capacity(scenario, deltas, profile[0])
    policy = indicator_policy(scenario)
    logger.info(f"[INSPECT] second best theta={profile.intensities} crime={crime:.10g}")
    return GameSolution(policy, profile, float(crime), _conditional_metrics(scenario, policy), True)


def crime_under_profile(scenario: Scenario, policy: ThresholdPolicy, profile: InspectionProfile) -> float:
    """Total crime sum_g N_g H_g(theta_g Delta_g(T_g)) for arbitrary thresholds and intensities."""
    return float(sum(
        g.population * float(g.outside_option(theta * float(delta_of_threshold(g.signal, T))))
        for g, T, theta in zip(scenario.groups, policy.thresholds, profile.intensities)
    ))


def threshold_search(scenario: Scenario, profile: InspectionProfile, grid_size: int = None) -> ThresholdPolicy:
    """
    Crime-minimizing thresholds at fixed intensities.

    Each group's crime N_g H_g(theta_g Delta_g(T)) is minimized directly by
    a grid over the 0.0005-0.9995 signal quantile span plus golden-section
    refinement; no crossing-point formula is used.

    Raises:
        HypothesisError: a group is never inspected, so its threshold is arbitrary
    """
    grid_size = grid_size or CONFIG['threshold_grid']
    q_lo, q_hi = CONFIG['threshold_quantiles']
    thresholds = []
    for group, theta in zip(scenario.groups, profile.intensities):
        if theta <= 0.0:
            raise HypothesisError(f"group '{group.name}' is never inspected; any threshold is optimal")
        lo = float(group.signal.ppf(q_lo, SignalHypothesis.INNOCENT))
        hi = float(group.signal.ppf(q_hi, SignalHypothesis.CRIME))

        def crime(T: float, group=group, theta=theta) -> float:
            return group.population * float(group.outside_option(theta * float(delta_of_threshold(group.signal, T))))

        T, _ = grid_then_refine(crime, lo, hi, grid_size, CONFIG['golden_tol'])
        thresholds.append(T)
    return ThresholdPolicy(tuple(thresholds))


def _combined_curvature(labels: Sequence[str]) -> str:
    kinds = set(labels) - {'linear'}
    if not kinds:
        return 'linear'
    if len(kinds) == 1 and 'mixed' not in kinds:
        return kinds.pop()
    return 'mixed'


def intensity_extremality_check(scenario: Scenario) -> ExtremalityReport:
    """
    Whether the police equilibrium is the best (convex H) or worst (concave
    H) capacity-binding profile for total crime.

    Crime is evaluated on a 1000-point grid of the binding segment; the
    local second derivative at the equilibrium is reported alongside.

    Equal maximal disincentives are required: with them, equal crime rates
    mean equal survivor densities, so the equilibrium is a stationary point
    of total crime on the segment.

    Raises:
        HypothesisError: outside options from different location families,
            unequal maximal disincentives, power survivors leaving their
            decreasing span, or mixed curvature
    """
    H1 = scenario.groups[0].outside_option
    H2 = scenario.groups[1].outside_option
    if not same_location_family(H1, H2):
        raise HypothesisError("outside options do not belong to the same location family")

    deltas = _max_disincentives(scenario)
    if abs(deltas[0] - deltas[1]) > CONFIG['equal_max_disincentive']:
        raise HypothesisError(
            f"maximal disincentives differ ({deltas[0]:.12g} vs {deltas[1]:.12g})"
        )
    lo, hi = capacity_segment(scenario)
    theta2_range = sorted(float(_partner_intensity(scenario, t)) for t in (lo, hi))
    spans = [(lo * deltas[0], hi * deltas[0]), (theta2_range[0] * deltas[1], theta2_range[1] * deltas[1])]

    for H, (a, b) in zip((H1, H2), spans):
        if H.family is SurvivorFamily.POWER and not (H.mu < a and b < H.mu + 1.0):
            raise HypothesisError(
                f"effective disincentives [{a:.4g}, {b:.4g}] leave the decreasing span "
                f"({H.mu:.4g}, {H.mu + 1.0:.4g})"
            )
    curvature = _combined_curvature([survivor_curvature(H, a, b) for H, (a, b) in zip((H1, H2), spans)])
    if curvature == 'mixed':
        raise HypothesisError("outside options mix convex and concave regions on the visited span")

    profile = equilibrium_intensities(scenario, deltas)
    grid = np.linspace(lo, hi, CONFIG['extremality_grid'])
    crimes = np.asarray(crime_along_capacity(scenario, deltas, grid))
    eq_crime = crime_along_capacity(scenario, deltas, profile[0])

    h = 1e-4 * (hi - lo)
    local = (
        crime_along_capacity(scenario, deltas, profile[0] + h)
        - 2.0 * eq_crime
        + crime_along_capacity(scenario, deltas, profile[0] - h)
    ) / h ** 2

    tol = CONFIG['extremum_rel_tol'] * max(1.0, abs(eq_crime))
    grid_min, grid_max = float(crimes.min()), float(crimes.max())
    attains_min = eq_crime <= grid_min + tol
    attains_max = eq_crime >= grid_max - tol
    verified = {
        'convex': attains_min,
        'concave': attains_max,
        'linear': attains_min and attains_max,
    }[curvature]
    logger.info(
        f"[INSPECT] extremality curvature={curvature} eq={eq_crime:.10g} "
        f"grid=[{grid_min:.10g}, {grid_max:.10g}] local d2={local:.4g}"
    )
    return ExtremalityReport(
        curvature=curvature,
        equilibrium=profile,
        equilibrium_crime=float(eq_crime),
        grid_min=grid_min,
        grid_max=grid_max,
        grid_bound=float(np.max(np.abs(np.diff(crimes)))),
        local_second_derivative=float(local),
        attains_min=bool(attains_min),
        attains_max=bool(attains_max),
        verified=bool(verified),
    )


def inspection_property_records(scenario: Scenario) -> List:
    """Property records for the inspection game, appended by verify_properties."""
    from scripts.optimize import PropertyRecord

    records = []
    shared = PropertyRecord('first_and_second_best_share_thresholds', True, None)
    try:
        fb, sb = first_best(scenario), second_best(scenario)
        searched = [threshold_search(scenario, sol.profile) for sol in (fb, sb)]
    except (NonInteriorEquilibrium, HypothesisError) as exc:
        shared.hypotheses_hold = False
        shared.witnesses = {'reason': str(exc)}
    else:
        search_gaps = [
            max(abs(a - b) for a, b in zip(sol.policy.thresholds, found.thresholds))
            for sol, found in zip((fb, sb), searched)
        ]
        excess = [
            crime_under_profile(scenario, sol.policy, sol.profile) - crime_under_profile(scenario, found, sol.profile)
            for sol, found in zip((fb, sb), searched)
        ]
        shared_gap = max(abs(a - b) for a, b in zip(searched[0].thresholds, searched[1].thresholds))
        tol = CONFIG['search_crime_tol'] * max(1.0, fb.crime)
        verified = (
            max(search_gaps) <= CONFIG['search_band']
            and shared_gap <= CONFIG['search_band']
            and max(excess) <= tol
        )
        if scenario.identical_signals:
            for sol in (fb, sb):
                (ctpr1, cfpr1), (ctpr2, cfpr2) = sol.conditional_metrics
                verified = verified and abs(ctpr1 - ctpr2) <= CONFIG['conditional_band'] \
                    and abs(cfpr1 - cfpr2) <= CONFIG['conditional_band']
        shared.witnesses = {
            'searched_thresholds': [list(p.thresholds) for p in searched],
            'search_gaps': search_gaps,
            'searched_threshold_gap': shared_gap,
            'crime_excess': excess,
            'first_best_crime': fb.crime,
            'second_best_crime': sb.crime,
        }
        shared.conclusion_verified = bool(verified)
    records.append(shared)

    extremal = PropertyRecord('equilibrium_intensity_is_extremal', True, None)
    try:
        report = intensity_extremality_check(scenario)
    except (NonInteriorEquilibrium, HypothesisError) as exc:
        extremal.hypotheses_hold = False
        extremal.witnesses = {'reason': str(exc)}
    else:
        extremal.witnesses = report.to_dict()
        extremal.conclusion_verified = report.verified
    records.append(extremal)
    return records
