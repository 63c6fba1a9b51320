"""
Outside options, groups and scenarios.

Each group's outside option is a survivor function H_g: the share of the
group whose composite benefit of crime b exceeds a disincentive level x.
Under a policy with disincentive Delta_g the group's crime rate is
H_g(Delta_g); in the inspection game it is H_g(theta_g * Delta_g).

Usage:
    from scripts.population import SurvivorFunction, crime_rate

    H = SurvivorFunction.normal(mu=0.0, sigma=2.0)
    crime_rate(H, 0.382925)                  # ~ 0.424078
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from scripts.errors import DomainError, InfeasibleError, InvariantError
from scripts.numerics import second_differences
from scripts.signals import ArrayLike, SignalStructure, _out

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'fosd_tol': 1e-12,
    'support_tail': 1e-9,
    'curvature_tol': 1e-12,
    'curvature_grid': 1001,
}


class SurvivorFamily(Enum):
    NORMAL = 'normal'
    LOGISTIC = 'logistic'
    POWER = 'power'


_SCIPY_SURVIVORS = {
    SurvivorFamily.NORMAL: stats.norm,
    SurvivorFamily.LOGISTIC: stats.logistic,
}


@dataclass(frozen=True)
class SurvivorFunction:
    """
    Non-increasing map from disincentive to crime probability.

    NORMAL / LOGISTIC: H(x) = 1 - F((x - mu) / sigma), strictly decreasing
    with image (0, 1).
    POWER: H(x) = 1 for x <= mu, (1 - (x - mu))**p on [mu, mu + 1], 0 beyond.
    Convex for p >= 1, concave for p <= 1 on its decreasing span.
    """
    family: SurvivorFamily
    mu: float
    sigma: Optional[float] = None
    p: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.family, SurvivorFamily):
            object.__setattr__(self, 'family', SurvivorFamily(self.family))
        problems = []
        if not np.isfinite(self.mu):
            problems.append(f"outside_option mu must be finite, got {self.mu}")
        if self.family is SurvivorFamily.POWER:
            if self.p is None or not (np.isfinite(self.p) and self.p > 0):
                problems.append(f"outside_option p must be > 0, got {self.p}")
        elif self.sigma is None or not (np.isfinite(self.sigma) and self.sigma > 0):
            problems.append(f"outside_option sigma must be > 0, got {self.sigma}")
        if problems:
            raise InvariantError(problems)

    @classmethod
    def normal(cls, mu: float, sigma: float) -> 'SurvivorFunction':
        return cls(SurvivorFamily.NORMAL, float(mu), sigma=float(sigma))

    @classmethod
    def logistic(cls, mu: float, sigma: float) -> 'SurvivorFunction':
        return cls(SurvivorFamily.LOGISTIC, float(mu), sigma=float(sigma))

    @classmethod
    def power(cls, mu: float, p: float) -> 'SurvivorFunction':
        return cls(SurvivorFamily.POWER, float(mu), p=float(p))

    @property
    def shape(self) -> float:
        return self.p if self.family is SurvivorFamily.POWER else self.sigma

    def __call__(self, x: ArrayLike) -> ArrayLike:
        z = np.asarray(x, dtype=float) - self.mu
        if self.family is SurvivorFamily.POWER:
            return _out(np.clip(1.0 - z, 0.0, 1.0) ** self.p)
        return _out(_SCIPY_SURVIVORS[self.family].sf(z / self.sigma))

    def sample(self, u: ArrayLike) -> ArrayLike:
        """
        Inverse-transform draw of the composite benefit b with P(b >= x) = H(x).

        u is uniform on [0, 1); no domain checks.
        """
        u = np.asarray(u, dtype=float)
        if self.family is SurvivorFamily.POWER:
            return _out(self.mu + 1.0 - u ** (1.0 / self.p))
        with np.errstate(divide='ignore'):
            return _out(self.mu + self.sigma * _SCIPY_SURVIVORS[self.family].isf(u))

    def image_contains(self, c: float) -> bool:
        if self.family is SurvivorFamily.POWER:
            return 0.0 <= c <= 1.0
        return 0.0 < c < 1.0

    def decreasing_span(self) -> Tuple[float, float]:
        """Interval where H is strictly decreasing (numerically truncated for full-support families)."""
        if self.family is SurvivorFamily.POWER:
            return self.mu, self.mu + 1.0
        tail = CONFIG['support_tail']
        return float(self.sample(1.0 - tail)), float(self.sample(tail))


@dataclass(frozen=True)
class Group:
    name: str
    population: float
    outside_option: SurvivorFunction
    signal: SignalStructure

    def __post_init__(self):
        # zero mass is allowed in-process for limiting cases; scenario files require > 0
        if not (np.isfinite(self.population) and self.population >= 0):
            raise InvariantError(f"population of group '{self.name}' must be >= 0, got {self.population}")


@dataclass(frozen=True)
class Scenario:
    groups: Tuple[Group, Group]
    inspection_capacity: Optional[float] = None
    name: str = 'scenario'

    def __post_init__(self):
        object.__setattr__(self, 'groups', tuple(self.groups))
        problems = []
        if len(self.groups) != 2:
            problems.append(f"a scenario has exactly two groups, got {len(self.groups)}")
        elif self.inspection_capacity is not None:
            total = self.groups[0].population + self.groups[1].population
            S = self.inspection_capacity
            if not (np.isfinite(S) and S > 0):
                problems.append(f"inspection capacity must be > 0, got {S}")
            elif S >= total:
                problems.append(
                    f"inspection capacity {S} must be below N_1 + N_2 = {total} (search capacity is limited)"
                )
        if problems:
            raise InvariantError(problems)

    @property
    def populations(self) -> np.ndarray:
        return np.array([g.population for g in self.groups], dtype=float)

    def swapped(self) -> 'Scenario':
        return replace(self, groups=(self.groups[1], self.groups[0]))

    def with_capacity(self, capacity: Optional[float]) -> 'Scenario':
        return replace(self, inspection_capacity=capacity)

    def with_group(self, index: int, **changes) -> 'Scenario':
        groups = list(self.groups)
        groups[index] = replace(groups[index], **changes)
        return replace(self, groups=tuple(groups))

    @property
    def identical_signals(self) -> bool:
        return self.groups[0].signal == self.groups[1].signal


# =============================================================================
# OPERATIONS
# =============================================================================

def crime_rate(H: SurvivorFunction, effective_disincentive: ArrayLike) -> ArrayLike:
    """Crime rate H(x) at effective disincentive x (Delta, or theta * Delta when inspected)."""
    return H(effective_disincentive)


def survivor_inverse(H: SurvivorFunction, c: float) -> float:
    """
    Disincentive level at which the crime rate equals c.

    Raises:
        InfeasibleError: c outside the image of H
    """
    if not H.image_contains(c):
        raise InfeasibleError(f"crime rate {c:.6g} outside the image of {H.family.value} survivor", 'cr')
    if H.family is SurvivorFamily.POWER:
        return H.mu + 1.0 - c ** (1.0 / H.p)
    return H.mu + H.sigma * float(_SCIPY_SURVIVORS[H.family].isf(c))


def fosd_check(H_low: SurvivorFunction, H_high: SurvivorFunction, grid_size: int) -> bool:
    """
    True iff H_high >= H_low - 1e-12 on a grid spanning both decreasing spans,
    i.e. the H_high group is (weakly) riskier.
    """
    if grid_size < 3:
        raise DomainError(f"grid_size must be >= 3, got {grid_size}")
    spans = H_low.decreasing_span() + H_high.decreasing_span()
    grid = np.linspace(min(spans), max(spans), grid_size)
    return bool(np.all(np.asarray(H_high(grid)) >= np.asarray(H_low(grid)) - CONFIG['fosd_tol']))


def same_location_family(H_a: SurvivorFunction, H_b: SurvivorFunction) -> bool:
    return H_a.family is H_b.family and H_a.shape == H_b.shape


def survivor_curvature(H: SurvivorFunction, lo: float, hi: float, grid_size: int = None) -> str:
    """
    Curvature of H on [lo, hi] from signed second differences.

    Returns:
        'linear', 'convex', 'concave' or 'mixed'
    """
    grid_size = CONFIG['curvature_grid'] if grid_size is None else grid_size
    d2 = second_differences(H(np.linspace(lo, hi, grid_size)))
    tol = CONFIG['curvature_tol']
    if np.all(np.abs(d2) <= tol):
        return 'linear'
    if np.all(d2 >= -tol):
        return 'convex'
    if np.all(d2 <= tol):
        return 'concave'
    return 'mixed'
