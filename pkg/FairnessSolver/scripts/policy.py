"""
Threshold policies and the per-group metrics they induce.

Under a threshold policy a member of group g is labeled guilty when the
signal s >= T_g:

    TPR_g = 1 - F_cc,g(T_g)      FPR_g = 1 - F_nc,g(T_g)
    FNR_g = 1 - TPR_g            Delta_g = TPR_g - FPR_g
    CR_g  = H_g(Delta_g)         PPV_g = CR TPR / (CR TPR + (1 - CR) FPR)

Usage:
    from scripts.policy import ThresholdPolicy, group_metrics, total_crime

    metrics = group_metrics(scenario, ThresholdPolicy((0.5, 0.5)))
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from scripts.errors import InvariantError
from scripts.population import Group, Scenario
from scripts.signals import SignalHypothesis, max_disincentive

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'ppv_min_denominator': 1e-12,
}


class FairnessNotion(Enum):
    FPR = 'fpr'
    FNR = 'fnr'
    PPV = 'ppv'
    DELTA = 'delta'
    CR = 'cr'

    @classmethod
    def parse(cls, value) -> Optional['FairnessNotion']:
        """'none' / None mean no constraint."""
        if value is None or isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ('', 'none'):
            return None
        return cls(text)


def notion_label(notion: Optional[FairnessNotion]) -> str:
    return 'none' if notion is None else notion.value


@dataclass(frozen=True)
class ThresholdPolicy:
    thresholds: Tuple[float, float]

    def __post_init__(self):
        thresholds = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, 'thresholds', thresholds)
        if not all(np.isfinite(t) for t in thresholds):
            raise InvariantError(f"policy thresholds must be finite, got {thresholds}")

    def __getitem__(self, index: int) -> float:
        return self.thresholds[index]

    def __len__(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class GroupMetrics:
    tpr: float
    fpr: float
    fnr: float
    ppv: Optional[float]
    delta: float
    crime_rate: float
    posterior_threshold: Optional[float]

    def to_dict(self) -> Dict[str, Optional[float]]:
        return asdict(self)

    def statistic(self, notion: FairnessNotion) -> Optional[float]:
        """Value the notion equalizes across groups."""
        return {
            FairnessNotion.FPR: self.fpr,
            FairnessNotion.FNR: self.fnr,
            FairnessNotion.PPV: self.ppv,
            FairnessNotion.DELTA: self.delta,
            FairnessNotion.CR: self.crime_rate,
        }[notion]


# =============================================================================
# VECTORIZED METRICS
# =============================================================================

def metric_arrays(group: Group, thresholds) -> Dict[str, np.ndarray]:
    """
    Metrics of one group over an array of thresholds.

    Undefined PPV entries are NaN.
    """
    T = np.asarray(thresholds, dtype=float)
    tpr = np.asarray(group.signal.sf(T, SignalHypothesis.CRIME), dtype=float)
    fpr = np.asarray(group.signal.sf(T, SignalHypothesis.INNOCENT), dtype=float)
    delta = tpr - fpr
    cr = np.asarray(group.outside_option(delta), dtype=float)
    denominator = cr * tpr + (1.0 - cr) * fpr
    with np.errstate(invalid='ignore', divide='ignore'):
        ppv = np.where(denominator >= CONFIG['ppv_min_denominator'], cr * tpr / denominator, np.nan)
    return {
        'tpr': tpr,
        'fpr': fpr,
        'fnr': 1.0 - tpr,
        'delta': delta,
        'crime_rate': cr,
        'ppv': ppv,
    }


def _posterior_values(group: Group, cr: float, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if cr <= 0.0 or cr >= 1.0:
        return np.full(s.shape, float(cr))
    log_ratio = np.asarray(group.signal.logpdf(s, SignalHypothesis.INNOCENT)) - np.asarray(
        group.signal.logpdf(s, SignalHypothesis.CRIME)
    )
    with np.errstate(over='ignore', invalid='ignore'):
        return cr / (cr + (1.0 - cr) * np.exp(log_ratio))


# =============================================================================
# OPERATIONS
# =============================================================================

def group_metrics(scenario: Scenario, policy: ThresholdPolicy) -> Tuple[GroupMetrics, GroupMetrics]:
    """Per-group TPR/FPR/FNR/PPV/Delta/CR and posterior threshold."""
    result = []
    for g, group in enumerate(scenario.groups):
        T = policy[g]
        arrays = metric_arrays(group, T)
        cr = float(arrays['crime_rate'])
        ppv = float(arrays['ppv'])
        posterior_thr = float(_posterior_values(group, cr, T))
        result.append(GroupMetrics(
            tpr=float(arrays['tpr']),
            fpr=float(arrays['fpr']),
            fnr=float(arrays['fnr']),
            ppv=ppv if np.isfinite(ppv) else None,
            delta=float(arrays['delta']),
            crime_rate=cr,
            posterior_threshold=posterior_thr if np.isfinite(posterior_thr) else None,
        ))
    return result[0], result[1]


def total_crime(scenario: Scenario, policy: ThresholdPolicy) -> float:
    """Objective sum_g N_g * CR_g."""
    metrics = group_metrics(scenario, policy)
    return float(sum(group.population * m.crime_rate for group, m in zip(scenario.groups, metrics)))


def posterior(scenario: Scenario, policy: ThresholdPolicy, group: int, s):
    """
    Pr(crime | s, g) with the prior CR_g induced by the same policy.

    A degenerate prior (CR_g of 0 or 1) is returned unchanged.
    """
    grp = scenario.groups[group]
    cr = float(metric_arrays(grp, policy[group])['crime_rate'])
    values = _posterior_values(grp, cr, s)
    return float(values) if np.ndim(values) == 0 else values


def posterior_thresholds(scenario: Scenario, policy: ThresholdPolicy) -> Tuple[Optional[float], Optional[float]]:
    """Posterior crime probability at each group's cutoff, pi_g = Pr(c | T_g, g)."""
    metrics = group_metrics(scenario, policy)
    return metrics[0].posterior_threshold, metrics[1].posterior_threshold


def indicator_policy(scenario: Scenario) -> ThresholdPolicy:
    """Threshold form of the rule 1{f_cc(s) >= f_nc(s)}: T_g = T*_g."""
    return ThresholdPolicy(tuple(max_disincentive(g.signal).argmax_threshold for g in scenario.groups))


def policy_metrics_frame(scenario: Scenario, policy: ThresholdPolicy) -> pd.DataFrame:
    rows = []
    for group, T, m in zip(scenario.groups, policy.thresholds, group_metrics(scenario, policy)):
        row = {'group': group.name, 'population': group.population, 'threshold': T}
        row.update(m.to_dict())
        rows.append(row)
    return pd.DataFrame(rows)
