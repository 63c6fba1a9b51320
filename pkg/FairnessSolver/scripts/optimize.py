"""
Crime minimization with and without a fairness constraint.

The unconstrained optimum sets every group at its maximal disincentive
(T_g = T*_g). A fairness notion ties group 2's threshold to group 1's
through `companion_threshold`; `solve_fair` then searches group 1's
threshold on a grid, refines the best cell by golden section and also
tries closed-form anchor points (T*_1, the threshold that puts group 2 at
T*_2, the smaller common maximal disincentive, the minimal common crime
rate c* = max_g H_g(max Delta_g)).

Usage:
    from scripts.optimize import solve_unconstrained, solve_fair, compare_notions

    best = solve_unconstrained(scenario)
    fair = solve_fair(scenario, 'fpr')
    table = compare_notions(scenario).to_frame()
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from scripts.errors import (
    FairnessSolverError,
    HypothesisError,
    InfeasibleError,
    VerificationFailure,
)
from scripts.numerics import bracketed_root, grid_then_refine, scan_roots
from scripts.policy import (
    FairnessNotion,
    ThresholdPolicy,
    group_metrics,
    indicator_policy,
    metric_arrays,
    notion_label,
    total_crime,
)
from scripts.population import Scenario, SurvivorFamily, fosd_check, survivor_inverse
from scripts.signals import (
    SignalHypothesis,
    delta_inverse,
    delta_of_threshold,
    max_disincentive,
    reflect_threshold,
    same_family,
)

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'outer_grid': 256,
    'outer_quantiles': (0.0005, 0.9995),
    'ppv_scan_cells': 512,
    'golden_tol': 1e-10,
    'feasible_residual': 1e-8,
    'equal_band': 1e-9,
    'equal_max_disincentive': 1e-10,
    'matched_crime_band': 1e-12,
    'reflection_band': 1e-9,
    'tie_band': 1e-8,
    'fosd_grid': 2001,
}


@dataclass(frozen=True)
class FairSolution:
    policy: ThresholdPolicy
    crime: float
    notion: Optional[FairnessNotion]
    residual: float
    companion_roots: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'notion': notion_label(self.notion),
            'thresholds': list(self.policy.thresholds),
            'crime': self.crime,
            'residual': self.residual,
            'companion_roots': self.companion_roots,
        }


@dataclass
class NotionComparison:
    crimes: Dict[str, Optional[float]]
    policies: Dict[str, Optional[ThresholdPolicy]]
    condition3: Optional[bool]
    epsilon: Optional[float]
    failures: Dict[str, str] = field(default_factory=dict)
    solutions: Dict[str, FairSolution] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for label, crime in self.crimes.items():
            policy = self.policies.get(label)
            rows.append({
                'notion': label,
                'crime': np.nan if crime is None else crime,
                'threshold_g1': np.nan if policy is None else policy[0],
                'threshold_g2': np.nan if policy is None else policy[1],
                'status': self.failures.get(label, 'ok'),
            })
        return pd.DataFrame(rows)


# =============================================================================
# UNCONSTRAINED OPTIMUM
# =============================================================================

def solve_unconstrained(scenario: Scenario) -> FairSolution:
    """Every group at its maximal disincentive: T_g = T*_g."""
    policy = indicator_policy(scenario)
    crime = total_crime(scenario, policy)
    logger.debug(f"[SOLVE] unconstrained T={policy.thresholds} crime={crime:.10g}")
    return FairSolution(policy=policy, crime=crime, notion=None, residual=0.0)


# =============================================================================
# COMPANION THRESHOLDS
# =============================================================================

def _group_span(scenario: Scenario, index: int) -> Tuple[float, float]:
    q_lo, q_hi = CONFIG['outer_quantiles']
    signal = scenario.groups[index].signal
    return float(signal.ppf(q_lo, SignalHypothesis.INNOCENT)), float(signal.ppf(q_hi, SignalHypothesis.CRIME))


def _probability_match(source: float, target_signal, hypothesis, notion: FairnessNotion) -> float:
    if not 0.0 < source < 1.0:
        raise InfeasibleError(f"group 1 CDF value {source:.3g} has no interior quantile", notion.value)
    return float(target_signal.ppf(source, hypothesis))


def _ppv_roots(scenario: Scenario, target: float) -> List[float]:
    group = scenario.groups[1]
    lo, hi = _group_span(scenario, 1)

    def gap_vec(T):
        return metric_arrays(group, T)['ppv'] - target

    def gap_scalar(T):
        value = float(metric_arrays(group, T)['ppv'])
        return value - target if np.isfinite(value) else np.nan

    return scan_roots(gap_vec, gap_scalar, lo, hi, CONFIG['ppv_scan_cells'])


def _companion(scenario: Scenario, notion: FairnessNotion, t1: float) -> Tuple[float, int]:
    """(T_2, number of candidate roots) matching group 1's statistic at t1."""
    sig1 = scenario.groups[0].signal
    sig2 = scenario.groups[1].signal
    H1 = scenario.groups[0].outside_option
    H2 = scenario.groups[1].outside_option

    if notion is FairnessNotion.FPR:
        c = float(sig1.cdf(t1, SignalHypothesis.INNOCENT))
        return _probability_match(c, sig2, SignalHypothesis.INNOCENT, notion), 1

    if notion is FairnessNotion.FNR:
        c = float(sig1.cdf(t1, SignalHypothesis.CRIME))
        return _probability_match(c, sig2, SignalHypothesis.CRIME, notion), 1

    if notion is FairnessNotion.DELTA:
        return delta_inverse(sig2, float(delta_of_threshold(sig1, t1)), 'increasing'), 1

    if notion is FairnessNotion.CR:
        c = float(H1(float(delta_of_threshold(sig1, t1))))
        required = survivor_inverse(H2, c)
        if not required > 0.0:
            raise InfeasibleError(f"crime rate {c:.6g} needs non-positive disincentive {required:.6g}", notion.value)
        try:
            return delta_inverse(sig2, required, 'increasing'), 1
        except InfeasibleError as exc:
            raise InfeasibleError(str(exc), notion.value) from exc

    if notion is FairnessNotion.PPV:
        target = float(metric_arrays(scenario.groups[0], t1)['ppv'])
        if not np.isfinite(target):
            raise InfeasibleError(f"PPV undefined for group 1 at T={t1:.6g}", notion.value)
        roots = _ppv_roots(scenario, target)
        if not roots:
            raise InfeasibleError(f"no group 2 threshold reaches PPV {target:.6g}", notion.value)
        crimes = [float(metric_arrays(scenario.groups[1], r)['crime_rate']) for r in roots]
        best = int(np.argmin(crimes))
        return roots[best], len(roots)

    raise ValueError(f"Unknown fairness notion: {notion}")


def companion_threshold(scenario: Scenario, notion, t1: float) -> float:
    """
    Group 2 threshold whose notion statistic equals group 1's at t1.

    FPR/FNR by quantile composition, Delta on the increasing branch of
    Delta_2, CR through the survivor inverse then Delta inversion, PPV by a
    512-cell sign-change scan (the crime-minimal root is returned).

    Raises:
        InfeasibleError: no such threshold exists
    """
    notion = FairnessNotion.parse(notion)
    T2, _ = _companion(scenario, notion, float(t1))
    return T2


# =============================================================================
# CONSTRAINED OPTIMUM
# =============================================================================

def _anchor_thresholds(scenario: Scenario, notion: FairnessNotion) -> List[float]:
    sig1, sig2 = scenario.groups[0].signal, scenario.groups[1].signal
    H1, H2 = scenario.groups[0].outside_option, scenario.groups[1].outside_option
    b1, b2 = max_disincentive(sig1), max_disincentive(sig2)
    anchors = [b1.argmax_threshold]
    try:
        if notion is FairnessNotion.FPR:
            anchors.append(float(sig1.ppf(sig2.cdf(b2.argmax_threshold, SignalHypothesis.INNOCENT), SignalHypothesis.INNOCENT)))
        elif notion is FairnessNotion.FNR:
            anchors.append(float(sig1.ppf(sig2.cdf(b2.argmax_threshold, SignalHypothesis.CRIME), SignalHypothesis.CRIME)))
        elif notion is FairnessNotion.DELTA and b2.upper < b1.upper:
            anchors.append(delta_inverse(sig1, b2.upper, 'increasing'))
        elif notion is FairnessNotion.CR:
            c_star = max(float(H1(b1.upper)), float(H2(b2.upper)))
            anchors.append(delta_inverse(sig1, survivor_inverse(H1, c_star), 'increasing'))
    except InfeasibleError as exc:
        logger.debug(f"[FAIR] anchor skipped for {notion.value}: {exc}")
    return [a for a in anchors if np.isfinite(a)]


@lru_cache(maxsize=512)
def _solve_fair_cached(scenario: Scenario, notion: FairnessNotion, grid_size: int) -> FairSolution:
    def objective(t1: float) -> float:
        try:
            T2, _ = _companion(scenario, notion, t1)
        except InfeasibleError:
            return np.inf
        if not np.isfinite(T2):
            return np.inf
        return total_crime(scenario, ThresholdPolicy((t1, T2)))

    lo, hi = _group_span(scenario, 0)
    candidates = [grid_then_refine(objective, lo, hi, grid_size, CONFIG['golden_tol'])]
    candidates += [(a, objective(a)) for a in _anchor_thresholds(scenario, notion)]

    best_t1, best_crime = candidates[0]
    for t1, crime in candidates[1:]:
        if crime < best_crime:
            best_t1, best_crime = t1, crime
    if not np.isfinite(best_crime):
        raise InfeasibleError("no feasible threshold pair in the search span", notion.value)

    T2, roots = _companion(scenario, notion, best_t1)
    policy = ThresholdPolicy((best_t1, T2))
    m1, m2 = group_metrics(scenario, policy)
    residual = abs(m1.statistic(notion) - m2.statistic(notion))
    if residual > CONFIG['feasible_residual']:
        logger.warning(f"[FAIR] {notion.value} residual {residual:.3g} above tolerance")
    if roots > 1:
        logger.info(f"[FAIR] {notion.value} companion has {roots} roots at the optimum; kept the crime-minimal one")
    logger.debug(f"[FAIR] {notion.value} T={policy.thresholds} crime={best_crime:.10g} residual={residual:.3g}")
    return FairSolution(policy=policy, crime=float(best_crime), notion=notion, residual=float(residual), companion_roots=roots)


def solve_fair(scenario: Scenario, notion, grid_size: int = None) -> FairSolution:
    """
    Crime-minimal policy among those equalizing `notion` across groups.

    Args:
        notion: FairnessNotion, its value ('fpr', 'fnr', 'ppv', 'delta',
            'cr') or 'none' for the unconstrained optimum
        grid_size: outer grid over group 1's 0.0005-0.9995 quantile span

    Raises:
        InfeasibleError: no policy satisfies the notion
    """
    notion = FairnessNotion.parse(notion)
    if notion is None:
        return solve_unconstrained(scenario)
    return _solve_fair_cached(scenario, notion, grid_size or CONFIG['outer_grid'])


def compare_notions(scenario: Scenario) -> NotionComparison:
    """
    Unconstrained optimum next to every fairness notion.

    Solver failures are recorded in `failures`, keyed by notion or by
    condition name, never raised.
    """
    solutions: Dict[str, FairSolution] = {'none': solve_unconstrained(scenario)}
    failures: Dict[str, str] = {}
    for notion in FairnessNotion:
        try:
            solutions[notion.value] = solve_fair(scenario, notion)
        except InfeasibleError as exc:
            failures[notion.value] = f"infeasible: {exc}"
            logger.warning(f"[COMPARE] {notion.value} infeasible: {exc}")
        except FairnessSolverError as exc:
            failures[notion.value] = f"{type(exc).__name__}: {exc}"
            logger.error(f"[COMPARE] {notion.value} failed: {exc}")

    baseline = solutions['none'].crime
    for label, sol in list(solutions.items()):
        if sol.crime < baseline - CONFIG['equal_band']:
            failures[label] = f"SolverError: crime {sol.crime:.10g} below unconstrained optimum {baseline:.10g}"
            logger.error(f"[COMPARE] {failures[label]}")
            del solutions[label]

    conditions = {}
    for name, condition in (
        ('error_rate_parity_condition', error_rate_parity_condition),
        ('crime_parity_margin', crime_parity_margin),
    ):
        try:
            conditions[name] = condition(scenario)
        except HypothesisError as exc:
            conditions[name] = None
            logger.debug(f"[COMPARE] {name} not applicable: {exc}")
        except FairnessSolverError as exc:
            conditions[name] = None
            failures[name] = f"{type(exc).__name__}: {exc}"
            logger.error(f"[COMPARE] {name} failed: {exc}")

    labels = ['none'] + [n.value for n in FairnessNotion]
    return NotionComparison(
        crimes={k: solutions[k].crime if k in solutions else None for k in labels},
        policies={k: solutions[k].policy if k in solutions else None for k in labels},
        condition3=conditions['error_rate_parity_condition'],
        epsilon=conditions['crime_parity_margin'],
        failures=failures,
        solutions=solutions,
    )


# =============================================================================
# STRUCTURAL CONDITIONS
# =============================================================================

def _oriented_by_max_disincentive(scenario: Scenario) -> Scenario:
    """Relabel so that group 2 has the larger maximal disincentive."""
    b1 = max_disincentive(scenario.groups[0].signal).upper
    b2 = max_disincentive(scenario.groups[1].signal).upper
    if abs(b1 - b2) <= CONFIG['equal_max_disincentive']:
        raise HypothesisError(f"maximal disincentives coincide ({b1:.12g} vs {b2:.12g})")
    return scenario.swapped() if b1 > b2 else scenario


def error_rate_parity_condition(scenario: Scenario) -> bool:
    """
    (F_cc,2)^-1(F_cc,1(T*_1)) >= (F_nc,2)^-1(F_nc,1(T*_1)), group 2 being
    the group with the larger maximal disincentive.

    When true, equalizing FPR and equalizing FNR each reach a crime level no
    higher than equalizing disincentives.

    Raises:
        HypothesisError: the maximal disincentives coincide
    """
    oriented = _oriented_by_max_disincentive(scenario)
    sig1, sig2 = oriented.groups[0].signal, oriented.groups[1].signal
    t_star = max_disincentive(sig1).argmax_threshold
    fnr_match = float(sig2.ppf(sig1.cdf(t_star, SignalHypothesis.CRIME), SignalHypothesis.CRIME))
    fpr_match = float(sig2.ppf(sig1.cdf(t_star, SignalHypothesis.INNOCENT), SignalHypothesis.INNOCENT))
    return fnr_match >= fpr_match


def _oriented_by_risk(scenario: Scenario) -> Scenario:
    """Relabel so that group 2 is the riskier group (its H dominates)."""
    H1, H2 = scenario.groups[0].outside_option, scenario.groups[1].outside_option
    grid = CONFIG['fosd_grid']
    if fosd_check(H1, H2, grid):
        return scenario
    if fosd_check(H2, H1, grid):
        return scenario.swapped()
    raise HypothesisError("neither outside option first-order dominates the other")


def crime_parity_margin(scenario: Scenario) -> float:
    """
    Margin eps >= 0 solving

        N_1 (H_2(D_1 + eps) - H_1(D_1)) + N_2 (H_2(D_1 + eps) - H_2(D_1)) = 0

    with D_1 the safer group's maximal disincentive. Equalizing crime rates
    beats equalizing disincentives exactly when the riskier group's maximal
    disincentive reaches D_1 + eps.

    Raises:
        HypothesisError: the outside options are not ordered by dominance
    """
    oriented = _oriented_by_risk(scenario)
    g1, g2 = oriented.groups
    H1, H2 = g1.outside_option, g2.outside_option
    d1 = max_disincentive(g1.signal).upper
    N1, N2 = g1.population, g2.population

    def gap(eps: float) -> float:
        h2 = float(H2(d1 + eps))
        return N1 * (h2 - float(H1(d1))) + N2 * (h2 - float(H2(d1)))

    if gap(0.0) <= 0.0:
        return 0.0
    # gap(eps_max) = -N_1 H_1(D_1) <= 0, also when H_1(D_1) underflows to 0
    eps_max = survivor_inverse(H2, N2 * float(H2(d1)) / (N1 + N2)) - d1
    if eps_max <= 0.0:
        return 0.0
    if gap(eps_max) >= 0.0:
        return eps_max
    eps = bracketed_root(gap, 0.0, eps_max)
    logger.debug(f"[FAIR] crime parity margin eps={eps:.12g} (bracket up to {eps_max:.6g})")
    return eps


# =============================================================================
# PROPERTY VERIFICATION
# =============================================================================

@dataclass
class PropertyRecord:
    claim: str
    hypotheses_hold: bool
    conclusion_verified: Optional[bool]
    witnesses: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.hypotheses_hold and self.conclusion_verified is False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'claim': self.claim,
            'hypotheses_hold': self.hypotheses_hold,
            'conclusion_verified': self.conclusion_verified,
            'witnesses': self.witnesses,
        }


def _crime_or_none(scenario: Scenario, notion: FairnessNotion) -> Optional[float]:
    try:
        return solve_fair(scenario, notion).crime
    except InfeasibleError:
        return None


def _check_identical_signals(scenario: Scenario) -> PropertyRecord:
    record = PropertyRecord('identical_signals_equalize_error_rates', scenario.identical_signals, None)
    if not record.hypotheses_hold:
        return record
    band = CONFIG['equal_band']
    opt = solve_unconstrained(scenario)
    m1, m2 = group_metrics(scenario, opt.policy)
    crimes = {n.value: _crime_or_none(scenario, n) for n in (FairnessNotion.FPR, FairnessNotion.FNR, FairnessNotion.DELTA)}
    record.witnesses = {
        'fpr_gap': abs(m1.fpr - m2.fpr),
        'fnr_gap': abs(m1.fnr - m2.fnr),
        'unconstrained_crime': opt.crime,
        'fair_crimes': crimes,
    }
    record.conclusion_verified = (
        abs(m1.fpr - m2.fpr) <= band
        and abs(m1.fnr - m2.fnr) <= band
        and all(c is not None and abs(c - opt.crime) <= band for c in crimes.values())
    )
    return record


def _check_equal_max_disincentive(scenario: Scenario) -> PropertyRecord:
    b1 = max_disincentive(scenario.groups[0].signal).upper
    b2 = max_disincentive(scenario.groups[1].signal).upper
    record = PropertyRecord('equal_max_disincentive_equalizes_disincentive', abs(b1 - b2) <= CONFIG['equal_band'], None)
    if not record.hypotheses_hold:
        return record
    opt = solve_unconstrained(scenario)
    m1, m2 = group_metrics(scenario, opt.policy)
    delta_crime = _crime_or_none(scenario, FairnessNotion.DELTA)
    record.witnesses = {'delta_gap': abs(m1.delta - m2.delta), 'unconstrained_crime': opt.crime, 'delta_crime': delta_crime}
    record.conclusion_verified = (
        abs(m1.delta - m2.delta) <= CONFIG['equal_band']
        and delta_crime is not None
        and abs(delta_crime - opt.crime) <= CONFIG['equal_band']
    )
    return record


def _check_parity_condition(scenario: Scenario) -> PropertyRecord:
    record = PropertyRecord('error_rate_parity_condition_orders_crime', True, None)
    try:
        condition = error_rate_parity_condition(scenario)
    except HypothesisError as exc:
        record.hypotheses_hold = False
        record.witnesses = {'reason': str(exc)}
        return record
    crimes = {n.value: _crime_or_none(scenario, n) for n in (FairnessNotion.FPR, FairnessNotion.FNR, FairnessNotion.DELTA)}
    record.witnesses = {'condition': condition, 'crimes': crimes}
    if condition:
        band = CONFIG['equal_band']
        delta = crimes['delta']
        record.conclusion_verified = delta is not None and all(
            crimes[k] is not None and crimes[k] <= delta + band for k in ('fpr', 'fnr')
        )
    return record


def _check_sharper_signal(scenario: Scenario) -> PropertyRecord:
    sig1, sig2 = scenario.groups[0].signal, scenario.groups[1].signal
    strict_h = all(g.outside_option.family is not SurvivorFamily.POWER for g in scenario.groups)
    k1, k2 = sig1.crime_shift / sig1.sigma, sig2.crime_shift / sig2.sigma
    hold = same_family(sig1.base, sig2.base) and strict_h and abs(k1 - k2) > 1e-9
    record = PropertyRecord('sharper_signal_favours_error_rate_parity', hold, None)
    if not hold:
        return record
    crimes = {n.value: _crime_or_none(scenario, n) for n in (FairnessNotion.FPR, FairnessNotion.FNR, FairnessNotion.DELTA)}
    record.witnesses = {'signal_ratios': [k1, k2], 'crimes': crimes}
    band = CONFIG['equal_band']
    delta = crimes['delta']
    record.conclusion_verified = delta is not None and all(
        crimes[k] is not None and crimes[k] < delta - band for k in ('fpr', 'fnr')
    )
    return record


def _check_symmetric_tie(scenario: Scenario) -> PropertyRecord:
    sig1, sig2 = scenario.groups[0].signal, scenario.groups[1].signal
    hold = same_family(sig1.base, sig2.base) and sig1.base.is_symmetric
    record = PropertyRecord('symmetric_base_error_parities_tie', hold, None)
    if not hold:
        return record
    try:
        fpr = solve_fair(scenario, FairnessNotion.FPR)
        fnr = solve_fair(scenario, FairnessNotion.FNR)
    except InfeasibleError as exc:
        record.witnesses = {'reason': str(exc)}
        record.conclusion_verified = False
        return record
    reflected = ThresholdPolicy(tuple(
        reflect_threshold(g.signal, T) for g, T in zip(scenario.groups, fpr.policy.thresholds)
    ))
    before = group_metrics(scenario, fpr.policy)
    after = group_metrics(scenario, reflected)
    band = CONFIG['reflection_band']
    record.witnesses = {
        'fpr_crime': fpr.crime,
        'fnr_crime': fnr.crime,
        'reflected_thresholds': list(reflected.thresholds),
        'reflected_fnr_gap': abs(after[0].fnr - after[1].fnr),
    }
    record.conclusion_verified = (
        abs(fpr.crime - fnr.crime) <= CONFIG['tie_band']
        and abs(after[0].fnr - after[1].fnr) <= band
        and all(abs(a.delta - b.delta) <= band for a, b in zip(before, after))
    )
    return record


def _check_crime_parity_margin(scenario: Scenario) -> PropertyRecord:
    record = PropertyRecord('crime_parity_margin_decides_winner', True, None)
    try:
        eps = crime_parity_margin(scenario)
    except HypothesisError as exc:
        record.hypotheses_hold = False
        record.witnesses = {'reason': str(exc)}
        return record
    oriented = _oriented_by_risk(scenario)
    d1 = max_disincentive(oriented.groups[0].signal).upper
    d2 = max_disincentive(oriented.groups[1].signal).upper
    delta_crime = _crime_or_none(scenario, FairnessNotion.DELTA)
    cr_crime = _crime_or_none(scenario, FairnessNotion.CR)
    margin = d2 - (d1 + eps)
    record.witnesses = {'epsilon': eps, 'margin': margin, 'delta_crime': delta_crime, 'cr_crime': cr_crime}
    if delta_crime is None:
        record.conclusion_verified = False
        return record
    advantage = -np.inf if cr_crime is None else delta_crime - cr_crime
    band = CONFIG['equal_band']
    if abs(advantage) <= band or abs(margin) <= band:
        record.conclusion_verified = True
    else:
        record.conclusion_verified = (advantage > 0) == (margin > 0)
    return record


def _check_matched_crime_rates(scenario: Scenario) -> PropertyRecord:
    g1, g2 = scenario.groups
    top1 = float(g1.outside_option(max_disincentive(g1.signal).upper))
    top2 = float(g2.outside_option(max_disincentive(g2.signal).upper))
    hold = abs(top1 - top2) <= CONFIG['matched_crime_band']
    record = PropertyRecord('matched_max_crime_rates_make_crime_parity_optimal', hold, None)
    if not hold:
        return record
    opt = solve_unconstrained(scenario)
    cr_crime = _crime_or_none(scenario, FairnessNotion.CR)
    record.witnesses = {'unconstrained_crime': opt.crime, 'cr_crime': cr_crime}
    record.conclusion_verified = cr_crime is not None and abs(cr_crime - opt.crime) <= CONFIG['equal_band']
    return record


def verify_properties(scenario: Scenario) -> List[PropertyRecord]:
    """
    Check every structural claim whose premises can be evaluated on the
    scenario. Records with unmet premises carry conclusion_verified=None.
    """
    from scripts.inspection import inspection_property_records

    checks = [
        _check_identical_signals,
        _check_equal_max_disincentive,
        _check_parity_condition,
        _check_sharper_signal,
        _check_symmetric_tie,
        _check_crime_parity_margin,
        _check_matched_crime_rates,
    ]
    records = []
    for check in checks:
        try:
            records.append(check(scenario))
        except FairnessSolverError as exc:
            logger.error(f"[VERIFY] {check.__name__} raised {type(exc).__name__}: {exc}")
            records.append(PropertyRecord(check.__name__.lstrip('_'), True, False, {'error': str(exc)}))
    if scenario.inspection_capacity is not None:
        records.extend(inspection_property_records(scenario))

    for record in records:
        status = 'n/a' if not record.hypotheses_hold else ('OK' if record.conclusion_verified else 'FAILED')
        logger.info(f"[VERIFY] {record.claim}: {status}")
    return records


def assert_verified(records: List[PropertyRecord]) -> None:
    failed = [r.claim for r in records if r.failed]
    if failed:
        raise VerificationFailure(f"conclusions failed with hypotheses satisfied: {', '.join(failed)}")
