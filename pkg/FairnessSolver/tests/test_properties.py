"""
Property-based tests over continuous parameters

Run tests:
    python -m pytest tests/test_properties.py -v
"""

import math
import os
import sys
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scripts.policy import ThresholdPolicy, posterior, total_crime
from scripts.optimize import solve_unconstrained
from scripts.population import SurvivorFunction, survivor_inverse
from scripts.scenarios import baseline, random_scenario
from scripts.signals import (
    BaseDensity,
    SignalStructure,
    delta_inverse,
    delta_of_threshold,
    error_rates,
    max_disincentive,
    reflect_threshold,
)


def phi(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


locations = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
scales = st.floats(min_value=0.2, max_value=4.0, allow_nan=False)
shifts = st.floats(min_value=0.1, max_value=4.0, allow_nan=False)
fractions = st.floats(min_value=0.02, max_value=0.98, allow_nan=False)


class TestSignalProperties(unittest.TestCase):

    @settings(max_examples=60, deadline=None)
    @given(mu=locations, sigma=scales, m=shifts)
    def test_normal_maximum_closed_form(self, mu, sigma, m):
        bounds = max_disincentive(SignalStructure(BaseDensity.normal(), mu, sigma, m))
        self.assertAlmostEqual(bounds.argmax_threshold, mu + m / 2.0, delta=1e-8 * max(1.0, sigma))
        self.assertAlmostEqual(bounds.upper, 2 * phi(m / (2 * sigma)) - 1, delta=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(mu=locations, sigma=scales, m=shifts, fraction=fractions, branch=st.sampled_from(['increasing', 'decreasing']))
    def test_delta_inverse_round_trip(self, mu, sigma, m, fraction, branch):
        dist = SignalStructure(BaseDensity.logistic(), mu, sigma, m)
        target = fraction * max_disincentive(dist).upper
        T = delta_inverse(dist, target, branch)
        self.assertAlmostEqual(delta_of_threshold(dist, T), target, delta=1e-10)
        t_star = max_disincentive(dist).argmax_threshold
        if branch == 'increasing':
            self.assertLessEqual(T, t_star + 1e-12)
        else:
            self.assertGreaterEqual(T, t_star - 1e-12)

    @settings(max_examples=60, deadline=None)
    @given(mu=locations, sigma=scales, m=shifts, T=st.floats(min_value=-6.0, max_value=6.0, allow_nan=False))
    def test_reflection_on_symmetric_base(self, mu, sigma, m, T):
        dist = SignalStructure(BaseDensity.normal(), mu, sigma, m)
        T_ref = reflect_threshold(dist, T)
        fpr, fnr = error_rates(dist, T)
        fpr_ref, fnr_ref = error_rates(dist, T_ref)
        self.assertAlmostEqual(fpr, fnr_ref, delta=1e-12)
        self.assertAlmostEqual(fnr, fpr_ref, delta=1e-12)


class TestPopulationProperties(unittest.TestCase):

    @settings(max_examples=60, deadline=None)
    @given(mu=locations, sigma=scales, c=fractions, family=st.sampled_from(['normal', 'logistic', 'power']))
    def test_survivor_inverse_round_trip(self, mu, sigma, c, family):
        if family == 'power':
            H = SurvivorFunction.power(mu, max(sigma, 0.5))
        else:
            H = SurvivorFunction(family, mu, sigma=sigma)
        self.assertAlmostEqual(H(survivor_inverse(H, c)), c, delta=1e-10)


class TestPolicyProperties(unittest.TestCase):

    @settings(max_examples=40, deadline=None)
    @given(t1=st.floats(min_value=-3.0, max_value=4.0), t2=st.floats(min_value=-3.0, max_value=4.0))
    def test_unconstrained_optimum_is_a_lower_bound(self, t1, t2):
        scenario = baseline()
        self.assertGreaterEqual(total_crime(scenario, ThresholdPolicy((t1, t2))), solve_unconstrained(scenario).crime - 1e-9)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000), s=st.floats(min_value=-5.0, max_value=5.0))
    def test_posterior_is_a_probability(self, seed, s):
        scenario = random_scenario(seed)
        policy = solve_unconstrained(scenario).policy
        for g in (0, 1):
            value = posterior(scenario, policy, g, s)
            self.assertTrue(0.0 <= value <= 1.0)
            self.assertFalse(np.isnan(value))


if __name__ == '__main__':
    unittest.main(verbosity=2)
