"""
Canonical and randomly generated scenarios.

    baseline               both signals Normal m/sigma = 1, H_1 = NS(0,2), H_2 = NS(2,2), N = 1000 each
    sharper_signal         baseline with group 2 m/sigma = 2
    mirrored               two-piece normal (sigma_L 0.5, sigma_R 1.5) and its reflection
    policed                baseline signals, H_2 = NS(0.2,2), capacity S = 1000
    crime_parity           m/sigma in {1, 2}, H_2 shifted so H_1(max D_1) = H_2(max D_2)
    unreachable_equilibrium  baseline with S = 1000 (no interior police equilibrium)
    power_pair(p)          power survivors at mu = -0.3 / -0.2, S = 1000
    margin_pair(offset)    group 2 max disincentive at D_1 + eps + offset

The JSON files under scenarios/ hold the first five plus power_pair(2).
"""

from typing import Callable, Dict, Optional

import numpy as np

from scripts.numerics import bracketed_root
from scripts.population import Group, Scenario, SurvivorFunction
from scripts.signals import BaseDensity, SignalStructure, max_disincentive

# =============================================================================
# CONFIGURATION
# =============================================================================

CONFIG = {
    'population': 1000.0,
    'capacity': 1000.0,
    'outside_scale': 2.0,
}


def _normal_signal(crime_shift: float, mu: float = 0.0, sigma: float = 1.0) -> SignalStructure:
    return SignalStructure(BaseDensity.normal(), mu, sigma, crime_shift)


def _pair(sig1, sig2, H1, H2, name: str, capacity: Optional[float] = None, populations=None) -> Scenario:
    N1, N2 = populations or (CONFIG['population'], CONFIG['population'])
    return Scenario(
        groups=(Group('g1', N1, H1, sig1), Group('g2', N2, H2, sig2)),
        inspection_capacity=capacity,
        name=name,
    )


def baseline() -> Scenario:
    s = CONFIG['outside_scale']
    return _pair(
        _normal_signal(1.0), _normal_signal(1.0),
        SurvivorFunction.normal(0.0, s), SurvivorFunction.normal(2.0, s),
        'baseline',
    )


def sharper_signal() -> Scenario:
    s = CONFIG['outside_scale']
    return _pair(
        _normal_signal(1.0), _normal_signal(2.0),
        SurvivorFunction.normal(0.0, s), SurvivorFunction.normal(2.0, s),
        'sharper_signal',
    )


def mirrored() -> Scenario:
    s = CONFIG['outside_scale']
    return _pair(
        SignalStructure(BaseDensity.two_piece_normal(0.0, 0.5, 1.5), 0.0, 1.0, 1.0),
        SignalStructure(BaseDensity.two_piece_normal(0.0, 1.5, 0.5), 0.0, 1.0, 1.0),
        SurvivorFunction.normal(0.0, s), SurvivorFunction.normal(2.0, s),
        'mirrored',
    )


def policed(capacity: float = None) -> Scenario:
    s = CONFIG['outside_scale']
    return _pair(
        _normal_signal(1.0), _normal_signal(1.0),
        SurvivorFunction.normal(0.0, s), SurvivorFunction.normal(0.2, s),
        'policed',
        capacity=CONFIG['capacity'] if capacity is None else capacity,
    )


def unreachable_equilibrium() -> Scenario:
    return baseline().with_capacity(CONFIG['capacity'])


def crime_parity() -> Scenario:
    s = CONFIG['outside_scale']
    sig1, sig2 = _normal_signal(1.0), _normal_signal(2.0)
    shift = max_disincentive(sig2).upper - max_disincentive(sig1).upper
    return _pair(
        sig1, sig2,
        SurvivorFunction.normal(0.0, s), SurvivorFunction.normal(shift, s),
        'crime_parity',
    )


def power_pair(p: float) -> Scenario:
    return _pair(
        _normal_signal(1.0), _normal_signal(1.0),
        SurvivorFunction.power(-0.3, p), SurvivorFunction.power(-0.2, p),
        f'power_pair_p{p:g}',
        capacity=CONFIG['capacity'],
    )


def hardened() -> Scenario:
    """Everybody offends whatever the policy: H = 1 on all achievable disincentives."""
    H = SurvivorFunction.normal(10.0, 0.1)
    return _pair(_normal_signal(1.0), _normal_signal(1.0), H, H, 'hardened')


def normal_shift_for(target: float) -> float:
    """Crime shift m of a standard Normal signal whose maximal disincentive is target."""
    return bracketed_root(lambda m: max_disincentive(_normal_signal(m)).upper - target, 1e-3, 12.0, xtol=1e-13)


def margin_pair(offset: float) -> Scenario:
    """
    Group 1 Normal m = 1, H_1 = NS(0,2), H_2 = NS(0.3,2); group 2 Normal with
    its maximal disincentive placed at D_1 + eps + offset.
    """
    from scripts.optimize import crime_parity_margin

    s = CONFIG['outside_scale']
    sig1 = _normal_signal(1.0)
    reference = _pair(sig1, sig1, SurvivorFunction.normal(0.0, s), SurvivorFunction.normal(0.3, s), 'margin_reference')
    eps = crime_parity_margin(reference)
    target = max_disincentive(sig1).upper + eps + offset
    return reference.with_group(1, signal=_normal_signal(normal_shift_for(target)))


CANONICAL: Dict[str, Callable[[], Scenario]] = {
    'baseline': baseline,
    'sharper_signal': sharper_signal,
    'mirrored': mirrored,
    'policed': policed,
    'crime_parity': crime_parity,
    'power_pair': lambda: power_pair(2.0),
}


# =============================================================================
# RANDOM SCENARIOS
# =============================================================================

def random_scenario(seed: int, identical_signals: bool = False, capacity: Optional[float] = None) -> Scenario:
    """
    Seeded location-scale scenario with a shared base family.

    Heterogeneous draws keep the two signal ratios m/sigma at least 0.2
    apart so the maximal disincentives differ.
    """
    rng = np.random.default_rng(seed)
    base = BaseDensity.normal() if rng.random() < 0.5 else BaseDensity.logistic()

    def signal(ratio: float) -> SignalStructure:
        sigma = float(rng.uniform(0.5, 2.0))
        return SignalStructure(base, float(rng.uniform(-1.0, 1.0)), sigma, ratio * sigma)

    if identical_signals:
        sig1 = signal(float(rng.uniform(0.4, 2.4)))
        sig2 = sig1
    else:
        low, high = float(rng.uniform(0.4, 1.2)), float(rng.uniform(1.4, 2.4))
        if rng.random() < 0.5:
            low, high = high, low
        sig1, sig2 = signal(low), signal(high)

    def outside() -> SurvivorFunction:
        mu, scale = float(rng.uniform(-1.0, 1.0)), float(rng.uniform(1.0, 3.0))
        return SurvivorFunction.normal(mu, scale) if rng.random() < 0.7 else SurvivorFunction.logistic(mu, scale)

    populations = (float(rng.uniform(500.0, 1500.0)), float(rng.uniform(500.0, 1500.0)))
    return _pair(sig1, sig2, outside(), outside(), f'random_{seed}', capacity=capacity, populations=populations)
