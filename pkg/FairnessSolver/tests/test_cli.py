"""
Integration Tests for the command-line interface

Run tests:
    python -m pytest tests/test_cli.py -v
    python tests/test_cli.py
"""

import contextlib
import io
import json
import os
import sys
import tempfile
import unittest

import pandas as pd
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scripts.cli import SWEEP_COLUMNS, run
from scripts.scenario_io import scenario_to_dict
from scripts.scenarios import baseline

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scenarios')
CANONICAL_FILES = ['baseline', 'sharper_signal', 'mirrored', 'policed', 'crime_parity', 'power_pair']
HEADER = (
    'param_value,crime_total,crime_g1,crime_g2,fpr_g1,fpr_g2,fnr_g1,fnr_g2,'
    'ppv_g1,ppv_g2,delta_g1,delta_g2,posterior_thr_g1,posterior_thr_g2'
)


def scenario_path(name: str) -> str:
    return os.path.join(SCENARIO_DIR, f"{name}.json")


def invoke(*argv):
    """Run the CLI; returns (exit code, stdout text)."""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = run([str(a) for a in argv])
    return code, out.getvalue()


class TestReports(unittest.TestCase):
    """JSON and table reports."""

    def test_solve_json(self):
        code, text = invoke('solve', scenario_path('baseline'), '--format', 'json')
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertEqual(set(report), {'command', 'scenario', 'solutions', 'metrics', 'theorem_report'})
        self.assertEqual(report['command'], 'solve')
        self.assertEqual(report['scenario']['name'], 'baseline')
        thresholds = report['solutions'][0]['thresholds']
        self.assertAlmostEqual(thresholds[0], 0.5, delta=1e-9)
        self.assertAlmostEqual(report['solutions'][0]['crime'], 1214.70, delta=0.01)
        self.assertEqual(len(report['metrics']), 2)

    def test_solve_table(self):
        code, text = invoke('solve', scenario_path('baseline'))
        self.assertEqual(code, 0)
        self.assertIn('SOLVE: baseline', text)
        self.assertIn('[METRICS]', text)

    def test_fair(self):
        code, text = invoke('fair', scenario_path('sharper_signal'), '--notion', 'fpr', '--format', 'json')
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertEqual(report['solutions'][0]['notion'], 'fpr')
        fprs = [row['fpr'] for row in report['metrics']]
        self.assertAlmostEqual(fprs[0], fprs[1], delta=1e-9)

    def test_compare(self):
        code, text = invoke('compare', scenario_path('baseline'), '--format', 'json')
        self.assertEqual(code, 0)
        report = json.loads(text)
        statuses = {s['notion']: s['status'] for s in report['solutions']}
        self.assertEqual(list(statuses), ['none', 'fpr', 'fnr', 'ppv', 'delta', 'cr'])
        self.assertTrue(statuses['cr'].startswith('infeasible'))
        self.assertEqual(statuses['fpr'], 'ok')

    def test_inspect(self):
        code, text = invoke('inspect', scenario_path('policed'), '--mode', 'second', '--format', 'json')
        self.assertEqual(code, 0)
        intensities = json.loads(text)['solutions'][0]['intensities']
        self.assertAlmostEqual(sum(intensities), 1.0, delta=1e-12)

        code, _ = invoke('inspect', scenario_path('policed'), '--mode', 'check')
        self.assertEqual(code, 0)

    def test_simulate(self):
        code, text = invoke(
            'simulate', scenario_path('policed'), '--n', 20000, '--seed', 5, '--inspection', 'second',
            '--format', 'json',
        )
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertEqual(len(report['metrics']), 6)
        self.assertEqual(report['solutions'][0]['seed'], 5)

        again = invoke(
            'simulate', scenario_path('policed'), '--n', 20000, '--seed', 5, '--inspection', 'second',
            '--format', 'json',
        )[1]
        self.assertEqual(text, again)

    def test_simulate_requires_seed(self):
        with self.assertRaises(SystemExit) as ctx:
            invoke('simulate', scenario_path('baseline'), '--n', 100)
        self.assertEqual(ctx.exception.code, 2)

    def test_verify(self):
        code, text = invoke('verify', scenario_path('sharper_signal'), '--format', 'json')
        self.assertEqual(code, 0)
        claims = [r['claim'] for r in json.loads(text)['theorem_report']]
        self.assertIn('error_rate_parity_condition_orders_crime', claims)

    @pytest.mark.slow
    def test_verify_canonical(self):
        for name in CANONICAL_FILES:
            with self.subTest(scenario=name):
                self.assertEqual(invoke('verify', scenario_path(name))[0], 0)


class TestExitCodes(unittest.TestCase):
    """Failures map to the documented exit codes."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text: str) -> str:
        path = os.path.join(self.tmp.name, 'scenario.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_missing_file(self):
        self.assertEqual(invoke('solve', os.path.join(self.tmp.name, 'nope.json'))[0], 2)

    def test_schema_error(self):
        self.assertEqual(invoke('solve', self.write('{"groups": 3}'))[0], 3)
        self.assertEqual(invoke('solve', self.write('{not json'))[0], 3)

    def test_invariant_error(self):
        doc = scenario_to_dict(baseline())
        doc['groups'][1]['signal']['sigma'] = 0.0
        self.assertEqual(invoke('solve', self.write(json.dumps(doc)))[0], 4)

    def test_hypothesis_error(self):
        self.assertEqual(invoke('inspect', scenario_path('baseline'), '--mode', 'first')[0], 4)

    def test_infeasible(self):
        self.assertEqual(invoke('fair', scenario_path('baseline'), '--notion', 'cr')[0], 5)

    def test_non_interior_equilibrium(self):
        doc = scenario_to_dict(baseline())
        doc['inspection'] = {'capacity': 1000.0}
        self.assertEqual(invoke('inspect', self.write(json.dumps(doc)), '--mode', 'second')[0], 5)


class TestSweep(unittest.TestCase):
    """Sweep CSV output."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def sweep(self, out_name: str, *extra) -> str:
        out = os.path.join(self.tmp.name, out_name)
        code, _ = invoke(
            'sweep', scenario_path('baseline'), '--param', 'groups.1.outside_option.mu',
            '--from', 0, '--to', 2, '--steps', 5, '--out', out, *extra,
        )
        self.assertEqual(code, 0)
        return out

    def read(self, path: str) -> bytes:
        with open(path, 'rb') as f:
            return f.read()

    def test_header_and_rows(self):
        text = self.read(self.sweep('a.csv')).decode('utf-8')
        lines = text.split('\n')
        self.assertEqual(lines[0], HEADER)
        self.assertEqual(len([line for line in lines[1:] if line]), 5)
        self.assertNotIn('\r', text)
        self.assertTrue(lines[1].startswith('0,'))
        self.assertTrue(lines[5].startswith('2,'))

    def test_reproducible(self):
        self.assertEqual(self.read(self.sweep('a.csv')), self.read(self.sweep('b.csv')))

    def test_workers_do_not_change_output(self):
        self.assertEqual(self.read(self.sweep('a.csv')), self.read(self.sweep('b.csv', '--workers', 2)))

    def test_infeasible_rows_are_nan(self):
        text = self.read(self.sweep('cr.csv', '--notion', 'cr')).decode('utf-8')
        rows = [line for line in text.split('\n')[1:] if line]
        self.assertTrue(any(',nan' in row for row in rows))

    def test_parquet(self):
        frame = pd.read_parquet(self.sweep('a.parquet'))
        self.assertEqual(list(frame.columns), SWEEP_COLUMNS)
        self.assertEqual(len(frame), 5)


def run_quick_tests():
    """Run quick smoke tests without unittest framework."""
    print("=" * 60)
    print("QUICK SMOKE TESTS")
    print("=" * 60)

    print("\n[TEST] solve:")
    code, text = invoke('solve', scenario_path('baseline'), '--format', 'json')
    assert code == 0, f"Failed: exit code {code}"
    assert json.loads(text)['command'] == 'solve', "Failed: report"
    print("  [PASS] JSON report")

    print("\n" + "=" * 60)
    print("[SUCCESS] All smoke tests passed!")
    print("=" * 60)


if __name__ == '__main__':
    run_quick_tests()

    print("\n" + "=" * 60)
    print("RUNNING FULL UNITTEST SUITE")
    print("=" * 60 + "\n")

    unittest.main(verbosity=2)
