"""
Unit Tests for the brute-force, Monte Carlo and integration oracles

Run tests:
    python -m pytest tests/test_oracle.py -v
    python -m pytest tests/test_oracle.py -v -m "not slow"
    python tests/test_oracle.py
"""

import os
import sys
import unittest

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scripts.errors import DomainError, InfeasibleError
from scripts.inspection import InspectionProfile, second_best
from scripts.optimize import solve_fair
from scripts.oracle import (
    COUNT_KEYS,
    EmpiricalMetrics,
    analytic_bands,
    grid_best_fair,
    integrated_disincentive,
    monte_carlo,
)
from scripts.policy import ThresholdPolicy, indicator_policy
from scripts.scenarios import CANONICAL, baseline, hardened, policed, random_scenario
from scripts.signals import BaseDensity, SignalStructure, max_disincentive

NOTIONS = ['none', 'fpr', 'fnr', 'ppv', 'delta', 'cr']


class TestIntegratedDisincentive(unittest.TestCase):
    """Simpson integral of f_cc - f_nc matches the maximal disincentive."""

    def test_families(self):
        for base in (
            BaseDensity.normal(),
            BaseDensity.logistic(),
            BaseDensity.gumbel(),
            BaseDensity.two_piece_normal(0.0, 0.5, 1.5),
        ):
            with self.subTest(family=base.family.value):
                dist = SignalStructure(base, 0.3, 1.2, 1.0)
                self.assertAlmostEqual(integrated_disincentive(dist), max_disincentive(dist).upper, delta=1e-8)


class TestGridOracle(unittest.TestCase):
    """solve_fair against the exhaustive grid."""

    def compare(self, scenario, notion):
        try:
            analytic = solve_fair(scenario, notion)
        except InfeasibleError:
            return
        grid = grid_best_fair(scenario, notion, resolution=256)
        self.assertLessEqual(abs(analytic.crime - grid.solution.crime), grid.bound)

    def test_canonical_scenarios(self):
        for name, build in CANONICAL.items():
            scenario = build()
            for notion in NOTIONS:
                with self.subTest(scenario=name, notion=notion):
                    self.compare(scenario, notion)

    @pytest.mark.slow
    def test_random_scenarios(self):
        for seed in range(20):
            scenario = random_scenario(200 + seed)
            for notion in NOTIONS:
                with self.subTest(seed=seed, notion=notion):
                    self.compare(scenario, notion)

    def test_unconstrained_grid_close_to_optimum(self):
        grid = grid_best_fair(baseline(), 'none', resolution=256)
        self.assertEqual(grid.feasible_pairs, 256 * 256)
        self.assertAlmostEqual(grid.solution.crime, 1214.70, delta=grid.bound)

    def test_resolution_floor(self):
        with self.assertRaises(DomainError):
            grid_best_fair(baseline(), 'fpr', resolution=32)

    def refine(self, scenario, notion):
        try:
            coarse = grid_best_fair(scenario, notion, resolution=256)
            fine = grid_best_fair(scenario, notion, resolution=512)
        except InfeasibleError:
            return
        self.assertLess(fine.bound, coarse.bound)
        self.assertLessEqual(abs(fine.solution.crime - coarse.solution.crime), coarse.bound)

    def test_resolution_refinement_baseline(self):
        for notion in ('none', 'fpr', 'fnr', 'delta'):
            with self.subTest(notion=notion):
                self.refine(baseline(), notion)

    @pytest.mark.slow
    def test_resolution_refinement_canonical(self):
        for name, build in CANONICAL.items():
            scenario = build()
            for notion in NOTIONS:
                with self.subTest(scenario=name, notion=notion):
                    self.refine(scenario, notion)


class TestMonteCarlo(unittest.TestCase):
    """Agent-level simulation agrees with the analytic metrics."""

    def assert_within_bands(self, scenario, policy, n, seed, profile=None):
        empirical = monte_carlo(scenario, policy, n, seed, profile=profile)
        excursions = 0
        for bands in analytic_bands(scenario, policy, empirical, profile=profile):
            for name, (expected, width, observed) in bands.items():
                if observed is None or abs(observed - expected) > width:
                    excursions += 1
        return excursions

    def test_baseline_single_seed(self):
        scenario = baseline()
        self.assertEqual(self.assert_within_bands(scenario, indicator_policy(scenario), 200_000, 1), 0)

    def test_worker_count_does_not_change_counts(self):
        scenario = policed()
        policy = indicator_policy(scenario)
        profile = second_best(scenario).profile
        serial = monte_carlo(scenario, policy, 50_000, 3, profile=profile, workers=1, chunk_size=8_192)
        threaded = monte_carlo(scenario, policy, 50_000, 3, profile=profile, workers=4, chunk_size=8_192)
        for a, b in zip(serial, threaded):
            self.assertEqual(a.counts, b.counts)
            self.assertEqual(sum(a.counts[k] for k in COUNT_KEYS[:4]), 50_000)

    def test_seed_changes_draws(self):
        scenario = baseline()
        policy = ThresholdPolicy((0.5, 0.5))
        a = monte_carlo(scenario, policy, 20_000, 1)
        b = monte_carlo(scenario, policy, 20_000, 2)
        self.assertNotEqual(a[0].counts, b[0].counts)

    def test_counts_must_sum(self):
        counts = dict.fromkeys(COUNT_KEYS, 1)
        with self.assertRaises(DomainError):
            EmpiricalMetrics.from_counts(counts, 10, seed=0)

    def test_requires_agents(self):
        with self.assertRaises(DomainError):
            monte_carlo(baseline(), ThresholdPolicy((0.5, 0.5)), 0, 1)

    def test_uninspected_group_has_no_error_rates(self):
        scenario = baseline()
        g1, g2 = monte_carlo(scenario, ThresholdPolicy((0.5, 0.5)), 100_000, 5, profile=InspectionProfile((0.0, 1.0)))
        self.assertIsNone(g1.fpr)
        self.assertIsNone(g1.fnr)
        self.assertEqual(g1.counts['criminal_inspected'] + g1.counts['innocent_inspected'], 0)
        # benefit >= 0 happens with probability H_1(0) = 1/2
        self.assertAlmostEqual(g1.crime_rate, 0.5, delta=0.01)
        self.assertIsNotNone(g2.fpr)
        self.assertIsNotNone(g2.fnr)

    def test_hardened_groups_always_offend(self):
        scenario = hardened()
        for metrics in monte_carlo(scenario, indicator_policy(scenario), 50_000, 11):
            self.assertEqual(metrics.crime_rate, 1.0)
            self.assertEqual(metrics.counts['innocent_convicted'] + metrics.counts['innocent_acquitted'], 0)
            self.assertIsNone(metrics.fpr)

    @pytest.mark.slow
    def test_many_seeds(self):
        cases = [(baseline(), None), (policed(), second_best(policed()).profile)]
        for scenario, profile in cases:
            policy = indicator_policy(scenario)
            excursions = {}
            for seed in range(10):
                empirical = monte_carlo(scenario, policy, 1_000_000, seed, profile=profile, workers=4)
                for g, bands in enumerate(analytic_bands(scenario, policy, empirical, profile=profile)):
                    for name, (expected, width, observed) in bands.items():
                        if abs(observed - expected) > width:
                            excursions[(g, name)] = excursions.get((g, name), 0) + 1
            with self.subTest(scenario=scenario.name):
                self.assertTrue(all(count <= 1 for count in excursions.values()), excursions)


def run_quick_tests():
    """Run quick smoke tests without unittest framework."""
    print("=" * 60)
    print("QUICK SMOKE TESTS")
    print("=" * 60)

    print("\n[TEST] integrated_disincentive:")
    dist = SignalStructure(BaseDensity.normal(), 0.0, 1.0, 1.0)
    assert abs(integrated_disincentive(dist) - max_disincentive(dist).upper) < 1e-8, "Failed: Simpson"
    print("  [PASS] Normal signal")

    print("\n[TEST] grid_best_fair:")
    analytic = solve_fair(baseline(), 'fpr')
    grid = grid_best_fair(baseline(), 'fpr')
    assert abs(analytic.crime - grid.solution.crime) <= grid.bound, "Failed: grid oracle"
    print("  [PASS] Baseline FPR")

    print("\n" + "=" * 60)
    print("[SUCCESS] All smoke tests passed!")
    print("=" * 60)


if __name__ == '__main__':
    run_quick_tests()

    print("\n" + "=" * 60)
    print("RUNNING FULL UNITTEST SUITE")
    print("=" * 60 + "\n")

    unittest.main(verbosity=2)
