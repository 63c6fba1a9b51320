"""
Signal distributions and the disincentive geometry they induce.

A signal structure is a location-scale transform of one base variable eta:

    innocent signal  s = mu + sigma * eta
    crime signal     s = mu + sigma * eta + m        (m > 0)

Under a threshold T the disincentive is Delta(T) = F_nc(T) - F_cc(T), the
extra conviction probability a crime buys. It peaks at T*, the crossing
point of the two densities.

Usage:
    from scripts.signals import BaseDensity, SignalStructure, max_disincentive

    dist = SignalStructure(BaseDensity.normal(), mu=0.0, sigma=1.0, crime_shift=1.0)
    bounds = max_disincentive(dist)          # T* = 0.5, upper ~ 0.382925
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy import stats

from scripts.errors import DomainError, InfeasibleError, InvariantError, SolverError
from scripts.numerics import bracketed_root, golden_section_max

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'argmax_quantiles': (1e-4, 0.9999),
    'mlrp_quantiles': (0.001, 0.999),
    'golden_tol': 1e-8,
    'threshold_tol': 1e-12,
    'crossing_grid': 2001,
    'at_max_tol': 1e-12,
}

ArrayLike = Union[float, np.ndarray]


def _out(x):
    """Scalars come back as float, arrays stay arrays."""
    return float(x) if np.ndim(x) == 0 else x


# =============================================================================
# BASE DENSITIES
# =============================================================================

class BaseFamily(Enum):
    NORMAL = 'normal'
    LOGISTIC = 'logistic'
    GUMBEL = 'gumbel'
    TWO_PIECE_NORMAL = 'two_piece_normal'


_SCIPY_FAMILIES = {
    BaseFamily.NORMAL: stats.norm,
    BaseFamily.LOGISTIC: stats.logistic,
    BaseFamily.GUMBEL: stats.gumbel_r,
}


@dataclass(frozen=True)
class BaseDensity:
    """
    Standard-form base density of eta.

    Normal, Logistic and Gumbel (maximum) are taken from scipy.stats in
    standard form. TwoPieceNormal joins two half-normals with scales
    sigma_left / sigma_right at `mode`; its log-density is piecewise
    quadratic with a continuous derivative, hence strictly log-concave.
    """
    family: BaseFamily
    mode: float = 0.0
    sigma_left: float = 1.0
    sigma_right: float = 1.0

    def __post_init__(self):
        if not isinstance(self.family, BaseFamily):
            object.__setattr__(self, 'family', BaseFamily(self.family))
        problems = []
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            if not self.sigma_left > 0:
                problems.append(f"sigma_left must be > 0, got {self.sigma_left}")
            if not self.sigma_right > 0:
                problems.append(f"sigma_right must be > 0, got {self.sigma_right}")
            if not np.isfinite(self.mode):
                problems.append(f"mode must be finite, got {self.mode}")
        if problems:
            raise InvariantError(problems)

    @classmethod
    def normal(cls) -> 'BaseDensity':
        return cls(BaseFamily.NORMAL)

    @classmethod
    def logistic(cls) -> 'BaseDensity':
        return cls(BaseFamily.LOGISTIC)

    @classmethod
    def gumbel(cls) -> 'BaseDensity':
        return cls(BaseFamily.GUMBEL)

    @classmethod
    def two_piece_normal(cls, mode: float, sigma_left: float, sigma_right: float) -> 'BaseDensity':
        return cls(BaseFamily.TWO_PIECE_NORMAL, float(mode), float(sigma_left), float(sigma_right))

    @property
    def is_symmetric(self) -> bool:
        if self.family in (BaseFamily.NORMAL, BaseFamily.LOGISTIC):
            return True
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            return self.sigma_left == self.sigma_right
        return False

    @property
    def center(self) -> float:
        """Reflection point of a symmetric base (mode for TwoPieceNormal)."""
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            return self.mode
        return 0.0

    # ---- two-piece normal closed forms ----

    def _tp_norm(self) -> float:
        return 2.0 / (self.sigma_left + self.sigma_right)

    def _tp_scale(self, x):
        return np.where(x < 0, self.sigma_left, self.sigma_right)

    def logpdf(self, z: ArrayLike) -> ArrayLike:
        z = np.asarray(z, dtype=float)
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            x = z - self.mode
            return _out(np.log(self._tp_norm()) + stats.norm.logpdf(x / self._tp_scale(x)))
        return _out(_SCIPY_FAMILIES[self.family].logpdf(z))

    def pdf(self, z: ArrayLike) -> ArrayLike:
        z = np.asarray(z, dtype=float)
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            x = z - self.mode
            return _out(self._tp_norm() * stats.norm.pdf(x / self._tp_scale(x)))
        return _out(_SCIPY_FAMILIES[self.family].pdf(z))

    def cdf(self, z: ArrayLike) -> ArrayLike:
        z = np.asarray(z, dtype=float)
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            x = z - self.mode
            c = self._tp_norm()
            left = c * self.sigma_left * stats.norm.cdf(x / self.sigma_left)
            right = 1.0 - c * self.sigma_right * stats.norm.sf(x / self.sigma_right)
            return _out(np.where(x < 0, left, right))
        return _out(_SCIPY_FAMILIES[self.family].cdf(z))

    def sf(self, z: ArrayLike) -> ArrayLike:
        z = np.asarray(z, dtype=float)
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            x = z - self.mode
            c = self._tp_norm()
            left = 1.0 - c * self.sigma_left * stats.norm.cdf(x / self.sigma_left)
            right = c * self.sigma_right * stats.norm.sf(x / self.sigma_right)
            return _out(np.where(x < 0, left, right))
        return _out(_SCIPY_FAMILIES[self.family].sf(z))

    def ppf(self, p: ArrayLike) -> ArrayLike:
        """Quantile without domain checks; p = 0 maps to -inf."""
        p = np.asarray(p, dtype=float)
        if self.family is BaseFamily.TWO_PIECE_NORMAL:
            c = self._tp_norm()
            w = self.sigma_left / (self.sigma_left + self.sigma_right)
            with np.errstate(invalid='ignore', divide='ignore'):
                left = self.mode + self.sigma_left * stats.norm.ppf(np.minimum(p / (c * self.sigma_left), 1.0))
                right = self.mode + self.sigma_right * stats.norm.isf(np.minimum((1.0 - p) / (c * self.sigma_right), 1.0))
            return _out(np.where(p < w, left, right))
        return _out(_SCIPY_FAMILIES[self.family].ppf(p))


# =============================================================================
# SIGNAL STRUCTURES
# =============================================================================

class SignalHypothesis(Enum):
    CRIME = 'crime'
    INNOCENT = 'innocent'


def _hypothesis(h) -> SignalHypothesis:
    return h if isinstance(h, SignalHypothesis) else SignalHypothesis(h)


@dataclass(frozen=True)
class SignalStructure:
    base: BaseDensity
    mu: float
    sigma: float
    crime_shift: float

    def __post_init__(self):
        problems = []
        if not np.isfinite(self.mu):
            problems.append(f"signal mu must be finite, got {self.mu}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            problems.append(f"signal sigma must be > 0, got {self.sigma}")
        if not (np.isfinite(self.crime_shift) and self.crime_shift > 0):
            problems.append(f"crime_shift must be > 0, got {self.crime_shift}")
        if problems:
            raise InvariantError(problems)

    @classmethod
    def unchecked(cls, base: BaseDensity, mu: float, sigma: float, crime_shift: float) -> 'SignalStructure':
        """Build without validation (used to exercise reversed orderings)."""
        obj = object.__new__(cls)
        for name, value in (('base', base), ('mu', mu), ('sigma', sigma), ('crime_shift', crime_shift)):
            object.__setattr__(obj, name, value)
        return obj

    def _loc(self, hypothesis) -> float:
        if _hypothesis(hypothesis) is SignalHypothesis.CRIME:
            return self.mu + self.crime_shift
        return self.mu

    def _z(self, s, hypothesis):
        return (np.asarray(s, dtype=float) - self._loc(hypothesis)) / self.sigma

    def pdf(self, s: ArrayLike, hypothesis) -> ArrayLike:
        return _out(np.asarray(self.base.pdf(self._z(s, hypothesis))) / self.sigma)

    def logpdf(self, s: ArrayLike, hypothesis) -> ArrayLike:
        return _out(np.asarray(self.base.logpdf(self._z(s, hypothesis))) - np.log(self.sigma))

    def cdf(self, s: ArrayLike, hypothesis) -> ArrayLike:
        return self.base.cdf(self._z(s, hypothesis))

    def sf(self, s: ArrayLike, hypothesis) -> ArrayLike:
        return self.base.sf(self._z(s, hypothesis))

    def ppf(self, p: ArrayLike, hypothesis) -> ArrayLike:
        return _out(self._loc(hypothesis) + self.sigma * np.asarray(self.base.ppf(p)))

    @property
    def center(self) -> float:
        """Location of the innocent-signal reflection point."""
        return self.mu + self.sigma * self.base.center


@dataclass(frozen=True)
class DisincentiveBounds:
    upper: float
    argmax_threshold: float
    lower: Optional[float] = None

    def __post_init__(self):
        problems = []
        if not (0.0 <= self.upper <= 1.0 + 1e-15):
            problems.append(f"upper disincentive outside [0, 1]: {self.upper}")
        if self.lower is not None and self.lower > 0.0:
            problems.append(f"lower disincentive must be <= 0, got {self.lower}")
        if problems:
            raise InvariantError(problems)


# =============================================================================
# OPERATIONS
# =============================================================================

def density_eval(dist: SignalStructure, s: float, hypothesis) -> Tuple[float, float]:
    """
    Density and CDF of the signal under one hypothesis.

    Examples:
        >>> dist = SignalStructure(BaseDensity.normal(), 0.0, 1.0, 1.0)
        >>> density_eval(dist, 0.5, 'crime')[1]     # Phi(-0.5)
        0.3085375387259869
    """
    return float(dist.pdf(s, hypothesis)), float(dist.cdf(s, hypothesis))


def quantile(dist: SignalStructure, p: ArrayLike, hypothesis) -> ArrayLike:
    """
    Inverse CDF of the signal under one hypothesis.

    Raises:
        DomainError: any p outside the open interval (0, 1)
    """
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError(f"quantile probability must lie in (0, 1), got {p}")
    return dist.ppf(arr, hypothesis)


def delta_of_threshold(dist: SignalStructure, T: ArrayLike) -> ArrayLike:
    """
    Disincentive Delta(T) = F_nc(T) - F_cc(T) = TPR - FPR.

    Upper-tail thresholds are evaluated from survivor functions so that
    small disincentives keep their relative precision.
    """
    T = np.asarray(T, dtype=float)
    lower_form = np.asarray(dist.cdf(T, SignalHypothesis.INNOCENT)) - np.asarray(dist.cdf(T, SignalHypothesis.CRIME))
    upper_form = np.asarray(dist.sf(T, SignalHypothesis.CRIME)) - np.asarray(dist.sf(T, SignalHypothesis.INNOCENT))
    midpoint = dist.center + 0.5 * dist.crime_shift
    return _out(np.where(T > midpoint, upper_form, lower_form))


def error_rates(dist: SignalStructure, T: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(FPR, FNR) = (1 - F_nc(T), F_cc(T))."""
    return dist.sf(T, SignalHypothesis.INNOCENT), dist.cdf(T, SignalHypothesis.CRIME)


def _log_likelihood_gap(dist: SignalStructure, s: ArrayLike) -> ArrayLike:
    """log f_nc(s) - log f_cc(s); positive left of T*, negative right of it."""
    return _out(np.asarray(dist.logpdf(s, SignalHypothesis.INNOCENT)) - np.asarray(dist.logpdf(s, SignalHypothesis.CRIME)))


@lru_cache(maxsize=512)
def max_disincentive(dist: SignalStructure) -> DisincentiveBounds:
    """
    Threshold T* maximizing Delta and the maximal disincentive Delta(T*).

    Golden-section maximization over the [1e-4, 0.9999] quantile span,
    then the density crossing f_nc(T*) = f_cc(T*) is polished by Brent's
    method inside an expanding bracket around the golden estimate.

    Raises:
        SolverError: the density crossing could not be bracketed
    """
    q_lo, q_hi = CONFIG['argmax_quantiles']
    lo = float(dist.ppf(q_lo, SignalHypothesis.INNOCENT))
    hi = float(dist.ppf(q_hi, SignalHypothesis.CRIME))
    t_gold, _ = golden_section_max(lambda t: float(delta_of_threshold(dist, t)), lo, hi, CONFIG['golden_tol'])

    gap = lambda t: float(_log_likelihood_gap(dist, t))
    width = 1e-4 * (hi - lo)
    a, b = t_gold - width, t_gold + width
    while gap(a) < 0.0 or gap(b) > 0.0:
        width *= 2.0
        a, b = t_gold - width, t_gold + width
        if width > 4.0 * (hi - lo):
            raise SolverError(f"Could not bracket the density crossing for {dist}")

    t_star = bracketed_root(gap, a, b, xtol=CONFIG['threshold_tol'])
    upper = float(delta_of_threshold(dist, t_star))
    logger.debug(f"[SIGNAL] T*={t_star:.12g} max disincentive={upper:.12g}")
    return DisincentiveBounds(upper=upper, argmax_threshold=t_star)


def _crossing_count(dist: SignalStructure) -> int:
    q_lo, q_hi = CONFIG['argmax_quantiles']
    lo = float(dist.ppf(q_lo, SignalHypothesis.INNOCENT))
    hi = float(dist.ppf(q_hi, SignalHypothesis.CRIME))
    gaps = np.asarray(_log_likelihood_gap(dist, np.linspace(lo, hi, CONFIG['crossing_grid'])))
    signs = np.sign(gaps[gaps != 0.0])
    return int(np.count_nonzero(np.diff(signs)))


def disincentive_bounds(dist: SignalStructure) -> DisincentiveBounds:
    """
    Achievable disincentive range [lower, upper].

    upper integrates f_cc - f_nc over {f_cc > f_nc}, which for a single
    crossing at T* is F_nc(T*) - F_cc(T*); lower integrates the complement
    and equals -upper.

    Raises:
        SolverError: the likelihood ratio crosses one more than once
    """
    crossings = _crossing_count(dist)
    if crossings != 1:
        raise SolverError(f"Expected a single density crossing, found {crossings}")
    bounds = max_disincentive(dist)
    return DisincentiveBounds(upper=bounds.upper, argmax_threshold=bounds.argmax_threshold, lower=-bounds.upper)


def mlrp_check(dist: SignalStructure, grid_size: int) -> bool:
    """
    True iff log f_cc - log f_nc is non-decreasing on an even grid covering
    the 0.001-0.999 quantiles of both signal distributions.
    """
    if grid_size < 3:
        raise DomainError(f"grid_size must be >= 3, got {grid_size}")
    q_lo, q_hi = CONFIG['mlrp_quantiles']
    ends = [
        float(dist.ppf(q, h))
        for q in (q_lo, q_hi)
        for h in (SignalHypothesis.INNOCENT, SignalHypothesis.CRIME)
    ]
    grid = np.linspace(min(ends), max(ends), grid_size)
    ratio = -np.asarray(_log_likelihood_gap(dist, grid))
    return bool(np.all(np.diff(ratio) >= -1e-12))


def delta_inverse(dist: SignalStructure, target: float, branch: str = 'increasing') -> float:
    """
    Threshold with Delta(T) = target on one side of T*.

    Args:
        target: required disincentive
        branch: 'increasing' (T <= T*) or 'decreasing' (T >= T*)

    Raises:
        InfeasibleError: target <= 0 or above the maximal disincentive
    """
    bounds = max_disincentive(dist)
    tol = CONFIG['at_max_tol']
    if not target > 0.0:
        raise InfeasibleError(f"disincentive {target:.6g} is not positive", 'delta')
    if target > bounds.upper + tol:
        raise InfeasibleError(f"disincentive {target:.6g} exceeds maximum {bounds.upper:.6g}", 'delta')
    t_star = bounds.argmax_threshold
    if target >= bounds.upper - tol:
        return t_star

    direction = -1.0 if branch == 'increasing' else 1.0
    step = dist.sigma
    far = t_star + direction * step
    for _ in range(80):
        if float(delta_of_threshold(dist, far)) < target:
            break
        step *= 2.0
        far = t_star + direction * step
    else:
        raise InfeasibleError(f"disincentive {target:.3g} not reachable on the {branch} branch", 'delta')

    a, b = sorted((far, t_star))
    return bracketed_root(lambda t: float(delta_of_threshold(dist, t)) - target, a, b, xtol=CONFIG['threshold_tol'])


def reflect_threshold(dist: SignalStructure, T: ArrayLike) -> ArrayLike:
    """
    T' = 2c + m - T with c the reflection point of the innocent density.

    For a symmetric base this swaps the roles of FPR and FNR and keeps Delta.
    """
    return _out(2.0 * dist.center + dist.crime_shift - np.asarray(T, dtype=float))


def same_family(base_a: BaseDensity, base_b: BaseDensity) -> bool:
    """Same base family with the same shape parameters (two-piece scales and mode)."""
    return base_a.family is base_b.family and base_a == base_b
