"""
Command-line entry point.

Run from the FairnessSolver/ directory:

    python -m scripts.cli solve scenarios/baseline.json
    python -m scripts.cli fair scenarios/baseline.json --notion delta --format json
    python -m scripts.cli compare scenarios/sharper_signal.json
    python -m scripts.cli inspect scenarios/policed.json --mode check
    python -m scripts.cli simulate scenarios/policed.json --n 1000000 --seed 7 --inspection second
    python -m scripts.cli sweep scenarios/baseline.json --param groups.1.outside_option.mu \\
        --from 0 --to 2 --steps 21 --out sweep.csv
    python -m scripts.cli verify scenarios/crime_parity.json

Reports go to stdout (table or JSON), logs to stderr. JSON reports always
carry the keys command, scenario, solutions, metrics and theorem_report.

Exit codes: 0 success, 1 unexpected error, 2 file error, 3 schema error,
4 invariant/hypothesis error, 5 infeasible or no interior equilibrium,
6 property verification failure.
"""

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
import pyarrow as pa

from scripts.errors import FairnessSolverError, InfeasibleError, InvariantError, SolverError
from scripts.inspection import first_best, inspection_property_records, second_best
from scripts.optimize import assert_verified, compare_notions, solve_fair, verify_properties
from scripts.oracle import analytic_bands, monte_carlo
from scripts.policy import FairnessNotion, group_metrics, notion_label, policy_metrics_frame
from scripts.population import Scenario
from scripts.scenario_io import load_policy_file, parse_scenario, scenario_to_dict, with_parameter

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

SWEEP_COLUMNS = [
    'param_value',
    'crime_total',
    'crime_g1', 'crime_g2',
    'fpr_g1', 'fpr_g2',
    'fnr_g1', 'fnr_g2',
    'ppv_g1', 'ppv_g2',
    'delta_g1', 'delta_g2',
    'posterior_thr_g1', 'posterior_thr_g2',
]

CONFIG = {
    'float_format': '%.12g',
    'notions': ['none'] + [n.value for n in FairnessNotion],
}


# =============================================================================
# LOGGING SETUP
# =============================================================================

def setup_logging(verbose: bool = False) -> logging.Logger:
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    logging.getLogger().setLevel(level)
    return logger


# =============================================================================
# REPORTS
# =============================================================================

def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, NaN and inf become null."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def new_report(command: str, scenario: Scenario) -> Dict[str, Any]:
    return {
        'command': command,
        'scenario': scenario_to_dict(scenario),
        'solutions': [],
        'metrics': [],
        'theorem_report': [],
    }


def _metric_rows(scenario: Scenario, policy, label: str) -> List[Dict[str, Any]]:
    rows = policy_metrics_frame(scenario, policy).to_dict(orient='records')
    for row in rows:
        row['notion'] = label
    return rows


def emit_report(report: Dict[str, Any], fmt: str) -> None:
    report = _clean(report)
    if fmt == 'json':
        print(json.dumps(report, indent=2, sort_keys=True))
        return

    print("=" * 60)
    print(f"{report['command'].upper()}: {report['scenario'].get('name', 'scenario')}")
    print("=" * 60)
    for title in ('solutions', 'metrics'):
        rows = report[title]
        if rows:
            print(f"\n[{title.upper()}]")
            print(pd.DataFrame([_flatten(r) for r in rows]).to_string(index=False))
    if report['theorem_report']:
        print("\n[THEOREM REPORT]")
        frame = pd.DataFrame([
            {k: r.get(k) for k in ('claim', 'hypotheses_hold', 'conclusion_verified')}
            for r in report['theorem_report']
        ])
        print(frame.to_string(index=False))


def _flatten(row: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for key, value in row.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                out[f"{key}.{sub}"] = v
        elif isinstance(value, list):
            out[key] = ", ".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in value)
        else:
            out[key] = value
    return out


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_solve(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('solve', scenario)
    solution = solve_fair(scenario, None)
    logger.info(f"[SOLVE] T={solution.policy.thresholds} crime={solution.crime:.10g}")
    report['solutions'].append(solution.to_dict())
    report['metrics'].extend(_metric_rows(scenario, solution.policy, 'none'))
    return report


def cmd_fair(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('fair', scenario)
    solution = solve_fair(scenario, args.notion)
    label = notion_label(solution.notion)
    logger.info(f"[FAIR] {label}: T={solution.policy.thresholds} crime={solution.crime:.10g}")
    report['solutions'].append(solution.to_dict())
    report['metrics'].extend(_metric_rows(scenario, solution.policy, label))
    return report


def cmd_compare(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('compare', scenario)
    comparison = compare_notions(scenario)
    selected = None if args.notion is None else notion_label(FairnessNotion.parse(args.notion))

    for label in CONFIG['notions']:
        if label in comparison.solutions:
            entry = comparison.solutions[label].to_dict()
            entry['status'] = 'ok'
        else:
            entry = {'notion': label, 'status': comparison.failures.get(label, 'not solved')}
        report['solutions'].append(entry)
        if label in comparison.solutions and selected in (None, label):
            report['metrics'].extend(_metric_rows(scenario, comparison.solutions[label].policy, label))

    report['theorem_report'].extend([
        {
            'claim': 'error_rate_parity_condition',
            'hypotheses_hold': comparison.condition3 is not None,
            'conclusion_verified': None,
            'witnesses': {'value': comparison.condition3},
        },
        {
            'claim': 'crime_parity_margin',
            'hypotheses_hold': comparison.epsilon is not None,
            'conclusion_verified': None,
            'witnesses': {'value': comparison.epsilon},
        },
    ])
    return report


def _game_rows(scenario: Scenario, solution, mode: str) -> List[Dict[str, Any]]:
    metrics = group_metrics(scenario, solution.policy)
    rows = []
    for g, group in enumerate(scenario.groups):
        theta = solution.profile[g]
        ctpr, cfpr = solution.conditional_metrics[g]
        rows.append({
            'mode': mode,
            'group': group.name,
            'threshold': solution.policy[g],
            'intensity': theta,
            'ctpr': ctpr,
            'cfpr': cfpr,
            'crime_rate': float(group.outside_option(theta * metrics[g].delta)),
        })
    return rows


def cmd_inspect(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('inspect', scenario)
    if args.mode == 'check':
        records = inspection_property_records(scenario)
        report['theorem_report'].extend(r.to_dict() for r in records)
        report['_records'] = records
        return report

    solution = first_best(scenario) if args.mode == 'first' else second_best(scenario)
    entry = solution.to_dict()
    entry['mode'] = args.mode
    report['solutions'].append(entry)
    report['metrics'].extend(_game_rows(scenario, solution, args.mode))
    return report


def cmd_simulate(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('simulate', scenario)
    profile = None
    if args.policy_from:
        policy, profile = load_policy_file(args.policy_from)
    else:
        policy = solve_fair(scenario, None).policy
    if profile is None and args.inspection != 'none':
        game = first_best(scenario) if args.inspection == 'first' else second_best(scenario)
        profile = game.profile

    logger.info(f"[MC] n={args.n} seed={args.seed} T={policy.thresholds} "
                f"theta={None if profile is None else profile.intensities}")
    empirical = monte_carlo(scenario, policy, args.n, args.seed, profile=profile, workers=args.workers)
    bands = analytic_bands(scenario, policy, empirical, profile=profile)

    report['solutions'].append({
        'thresholds': list(policy.thresholds),
        'intensities': None if profile is None else list(profile.intensities),
        'n': args.n,
        'seed': args.seed,
        'empirical': [e.to_dict() for e in empirical],
    })
    for group, group_bands in zip(scenario.groups, bands):
        for name, (expected, width, observed) in group_bands.items():
            report['metrics'].append({
                'group': group.name,
                'metric': name,
                'analytic': expected,
                'band': width,
                'empirical': observed,
                'within_band': observed is not None and abs(observed - expected) <= width,
            })
    return report


def sweep_row(scenario: Scenario, param: str, notion: Optional[str], value: float) -> Dict[str, float]:
    """One sweep row; infeasible or invalid parameter values give NaN metrics."""
    row = {column: np.nan for column in SWEEP_COLUMNS}
    row['param_value'] = float(value)
    try:
        variant = with_parameter(scenario, param, value)
        solution = solve_fair(variant, notion)
    except (InfeasibleError, SolverError, InvariantError) as exc:
        logger.warning(f"[SWEEP] {param}={value:.12g}: {exc}")
        return row

    row['crime_total'] = solution.crime
    for g, m in enumerate(group_metrics(variant, solution.policy), start=1):
        row[f'crime_g{g}'] = m.crime_rate
        row[f'fpr_g{g}'] = m.fpr
        row[f'fnr_g{g}'] = m.fnr
        row[f'ppv_g{g}'] = np.nan if m.ppv is None else m.ppv
        row[f'delta_g{g}'] = m.delta
        row[f'posterior_thr_g{g}'] = np.nan if m.posterior_threshold is None else m.posterior_threshold
    return row


def run_sweep(
    scenario: Scenario,
    param: str,
    start: float,
    stop: float,
    steps: int,
    notion: Optional[str] = None,
    workers: int = 1,
) -> pd.DataFrame:
    """Rows in parameter order regardless of worker count."""
    if steps < 1:
        raise InvariantError(f"--steps must be >= 1, got {steps}")
    values = np.linspace(start, stop, steps) if steps > 1 else np.array([start])
    task = partial(sweep_row, scenario, param, notion)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(task, values))
    else:
        rows = [task(v) for v in values]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS).astype('float64')


def write_sweep(frame: pd.DataFrame, path: str) -> str:
    if path.endswith('.parquet'):
        schema = pa.schema([(column, pa.float64()) for column in SWEEP_COLUMNS])
        frame.to_parquet(path, index=False, engine='pyarrow', schema=schema)
    else:
        frame.to_csv(
            path,
            index=False,
            float_format=CONFIG['float_format'],
            lineterminator='\n',
            na_rep='nan',
        )
    logger.info(f"[SWEEP] wrote {len(frame)} rows to {path}")
    return path


def cmd_sweep(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('sweep', scenario)
    frame = run_sweep(scenario, args.param, args.start, args.stop, args.steps, args.notion, args.workers)
    write_sweep(frame, args.out)
    report['metrics'].extend(frame.to_dict(orient='records'))
    return report


def cmd_verify(args, scenario: Scenario) -> Dict[str, Any]:
    report = new_report('verify', scenario)
    records = verify_properties(scenario)
    report['theorem_report'].extend(r.to_dict() for r in records)
    report['_records'] = records
    return report


COMMANDS = {
    'solve': cmd_solve,
    'fair': cmd_fair,
    'compare': cmd_compare,
    'inspect': cmd_inspect,
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
    'verify': cmd_verify,
}


# =============================================================================
# CLI INTERFACE
# =============================================================================

def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('scenario', help='Scenario JSON file')
    common.add_argument('--format', choices=['table', 'json'], default='table', help='Report format (default: table)')
    common.add_argument('--verbose', '-v', action='store_true', help='Debug logging')

    parser = argparse.ArgumentParser(
        description='Fairness-constrained classification with endogenous crime rates',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Unconstrained optimum
    python -m scripts.cli solve scenarios/baseline.json

    # Every notion side by side, as JSON
    python -m scripts.cli compare scenarios/sharper_signal.json --format json

    # Reproducible parameter sweep
    python -m scripts.cli sweep scenarios/baseline.json --param groups.1.outside_option.mu \\
        --from 0 --to 2 --steps 21 --out sweep.csv
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('solve', parents=[common], help='Unconstrained crime-minimizing policy')

    fair = sub.add_parser('fair', parents=[common], help='Crime-minimizing policy under one notion')
    fair.add_argument('--notion', choices=CONFIG['notions'], required=True)

    compare = sub.add_parser('compare', parents=[common], help='All notions side by side')
    compare.add_argument('--notion', choices=CONFIG['notions'], default=None,
                         help='Only list metrics for this notion')

    inspect = sub.add_parser('inspect', parents=[common], help='Police inspection game')
    inspect.add_argument('--mode', choices=['first', 'second', 'check'], required=True)

    simulate = sub.add_parser('simulate', parents=[common], help='Monte Carlo agent simulation')
    simulate.add_argument('--n', type=int, required=True, help='Agents per group')
    simulate.add_argument('--seed', type=int, required=True)
    simulate.add_argument('--policy-from', dest='policy_from', default=None,
                          help='JSON file {"thresholds": [..], "intensities": [..]}')
    simulate.add_argument('--inspection', choices=['none', 'first', 'second'], default='none',
                          help='Inspection profile when the policy file has none')
    simulate.add_argument('--workers', type=int, default=1)

    sweep = sub.add_parser('sweep', parents=[common], help='Parameter sweep to CSV or parquet')
    sweep.add_argument('--param', required=True, help='Dotted path, e.g. groups.1.outside_option.mu')
    sweep.add_argument('--from', dest='start', type=float, required=True)
    sweep.add_argument('--to', dest='stop', type=float, required=True)
    sweep.add_argument('--steps', type=int, required=True)
    sweep.add_argument('--out', required=True, help='Output .csv or .parquet path')
    sweep.add_argument('--notion', choices=CONFIG['notions'], default='none')
    sweep.add_argument('--workers', type=int, default=1)

    sub.add_parser('verify', parents=[common], help='Check every structural property')

    return parser.parse_args(argv)


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = parse_arguments(argv)
    setup_logging(args.verbose)

    logger.info("=" * 60)
    logger.info(f"[START] {args.command} {args.scenario}")
    logger.info("=" * 60)

    try:
        scenario = parse_scenario(args.scenario)
        report = COMMANDS[args.command](args, scenario)
        records = report.pop('_records', None)
        emit_report(report, args.format)
        if records is not None:
            assert_verified(records)
    except FairnessSolverError as e:
        logger.error(f"[FAILED] {type(e).__name__}: {e}")
        logger.debug("Full traceback:", exc_info=True)
        return e.exit_code
    except Exception as e:
        logger.error(f"[FAILED] Unexpected error: {e}")
        logger.exception("Full traceback:")
        return 1

    logger.info(f"[COMPLETE] {args.command} finished successfully")
    return 0


def main():
    """Main entry point."""
    sys.exit(run())


if __name__ == '__main__':
    main()
