"""
Unit Tests for scenario and policy files

Run tests:
    python -m pytest tests/test_scenario_io.py -v
    python tests/test_scenario_io.py
"""

import json
import os
import sys
import tempfile
import unittest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scripts.errors import InvariantError, ScenarioFileError, SchemaError
from scripts.scenario_io import (
    dump_scenario,
    load_policy_file,
    parse_scenario,
    scenario_to_dict,
    with_parameter,
    write_scenario,
)
from scripts.scenarios import baseline, crime_parity, mirrored, policed, sharper_signal

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scenarios')
CANONICAL_FILES = ['baseline', 'sharper_signal', 'mirrored', 'policed', 'crime_parity', 'power_pair']


def canonical_path(name: str) -> str:
    return os.path.join(SCENARIO_DIR, f"{name}.json")


class TestCanonicalFiles(unittest.TestCase):
    """The shipped scenario files load and round-trip."""

    def test_round_trip_is_byte_identical(self):
        for name in CANONICAL_FILES:
            with self.subTest(scenario=name):
                with open(canonical_path(name), 'r', encoding='utf-8') as f:
                    text = f.read()
                self.assertEqual(dump_scenario(parse_scenario(canonical_path(name))), text)

    def test_files_match_builders(self):
        for build in (baseline, sharper_signal, mirrored, policed):
            with self.subTest(scenario=build.__name__):
                loaded = parse_scenario(canonical_path(build.__name__))
                self.assertEqual(loaded, build())

    def test_crime_parity_shift(self):
        loaded = parse_scenario(canonical_path('crime_parity'))
        built = crime_parity()
        self.assertAlmostEqual(
            loaded.groups[1].outside_option.mu, built.groups[1].outside_option.mu, delta=1e-12
        )


class TestParseErrors(unittest.TestCase):
    """Diagnostics for broken scenario files."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text: str) -> str:
        path = os.path.join(self.tmp.name, 'scenario.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def write_doc(self, doc) -> str:
        return self.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def test_missing_file(self):
        with self.assertRaises(ScenarioFileError) as ctx:
            parse_scenario(os.path.join(self.tmp.name, 'missing.json'))
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_malformed_json(self):
        path = self.write('{\n  "groups": [\n    {,\n  ]\n}\n')
        with self.assertRaises(SchemaError) as ctx:
            parse_scenario(path)
        self.assertEqual(ctx.exception.exit_code, 3)
        self.assertIn('line 3', str(ctx.exception))

    def test_missing_key(self):
        doc = scenario_to_dict(baseline())
        del doc['groups'][1]['signal']['crime_shift']
        with self.assertRaises(SchemaError) as ctx:
            parse_scenario(self.write_doc(doc))
        self.assertIn('groups[1].signal.crime_shift', str(ctx.exception))

    def test_unknown_family(self):
        doc = scenario_to_dict(baseline())
        doc['groups'][0]['outside_option']['family'] = 'cauchy'
        with self.assertRaises(SchemaError):
            parse_scenario(self.write_doc(doc))

    def test_zero_sigma_is_line_anchored(self):
        doc = scenario_to_dict(baseline())
        doc['groups'][0]['signal']['sigma'] = 0.0
        with self.assertRaises(InvariantError) as ctx:
            parse_scenario(self.write_doc(doc))
        self.assertEqual(ctx.exception.exit_code, 4)
        self.assertIn('line 15: groups[0].signal.sigma', str(ctx.exception))

    def test_capacity_above_population(self):
        doc = scenario_to_dict(policed())
        doc['inspection']['capacity'] = 2000.0
        with self.assertRaises(InvariantError) as ctx:
            parse_scenario(self.write_doc(doc))
        self.assertIn('search capacity is limited', str(ctx.exception))

    def test_every_violation_reported(self):
        doc = scenario_to_dict(baseline())
        doc['groups'][0]['population'] = -5.0
        doc['groups'][1]['signal']['crime_shift'] = 0.0
        with self.assertRaises(InvariantError) as ctx:
            parse_scenario(self.write_doc(doc))
        self.assertEqual(len(ctx.exception.problems), 2)

    def test_write_then_parse(self):
        path = write_scenario(mirrored(), os.path.join(self.tmp.name, 'mirrored.json'))
        self.assertEqual(parse_scenario(path), mirrored())


class TestParameterPaths(unittest.TestCase):
    """Dotted parameter paths used by sweeps."""

    def test_outside_option_mu(self):
        changed = with_parameter(baseline(), 'groups.1.outside_option.mu', 1.0)
        self.assertEqual(changed.groups[1].outside_option.mu, 1.0)
        self.assertEqual(changed.groups[0], baseline().groups[0])

    def test_add_capacity(self):
        changed = with_parameter(baseline(), 'inspection.capacity', 800.0)
        self.assertEqual(changed.inspection_capacity, 800.0)

    def test_bad_paths(self):
        for path in ('groups.2.population', 'groups.0.signal.nope', 'name.x'):
            with self.subTest(path=path):
                with self.assertRaises(SchemaError):
                    with_parameter(baseline(), path, 1.0)

    def test_invalid_value(self):
        with self.assertRaises(InvariantError):
            with_parameter(baseline(), 'groups.0.signal.sigma', -1.0)


class TestPolicyFile(unittest.TestCase):
    """Policy files for simulate --policy-from."""

    def test_thresholds_and_intensities(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'policy.json')
            with open(path, 'w', encoding='utf-8') as f:
                json.dump({'thresholds': [0.5, 0.6], 'intensities': [0.3, 0.7]}, f)
            policy, profile = load_policy_file(path)
        self.assertEqual(policy.thresholds, (0.5, 0.6))
        self.assertEqual(profile.intensities, (0.3, 0.7))

    def test_bad_policy(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'policy.json')
            with open(path, 'w', encoding='utf-8') as f:
                json.dump({'thresholds': [0.5]}, f)
            with self.assertRaises(SchemaError):
                load_policy_file(path)


def run_quick_tests():
    """Run quick smoke tests without unittest framework."""
    print("=" * 60)
    print("QUICK SMOKE TESTS")
    print("=" * 60)

    print("\n[TEST] parse_scenario:")
    for name in CANONICAL_FILES:
        parse_scenario(canonical_path(name))
    print(f"  [PASS] {len(CANONICAL_FILES)} canonical files load")

    print("\n" + "=" * 60)
    print("[SUCCESS] All smoke tests passed!")
    print("=" * 60)


if __name__ == '__main__':
    run_quick_tests()

    print("\n" + "=" * 60)
    print("RUNNING FULL UNITTEST SUITE")
    print("=" * 60 + "\n")

    unittest.main(verbosity=2)
