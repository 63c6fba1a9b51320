"""
Scenario files: JSON documents describing two groups and an optional
inspection capacity.

    {
      "groups": [
        {
          "name": "g1",
          "outside_option": {"family": "normal", "mu": 0.0, "sigma": 2.0},
          "population": 1000.0,
          "signal": {"base": "normal", "crime_shift": 1.0, "mu": 0.0, "sigma": 1.0}
        },
        ...
      ],
      "inspection": {"capacity": 1000.0},
      "name": "policed"
    }

outside_option.family is normal | logistic (mu, sigma) or power (mu, p).
signal.base is normal | logistic | gumbel | two_piece_normal; the last one
also takes sigma_left, sigma_right and an optional mode (default 0).

Every problem is reported at once, each prefixed with the line of the
offending key.
"""

import copy
import json
import logging
import os
import re
from collections import defaultdict
from typing import Any, Dict, List, Optional, Tuple

from scripts.errors import InvariantError, ScenarioFileError, SchemaError
from scripts.inspection import InspectionProfile
from scripts.policy import ThresholdPolicy
from scripts.population import Group, Scenario, SurvivorFamily, SurvivorFunction
from scripts.signals import BaseDensity, BaseFamily, SignalStructure

logger = logging.getLogger(__name__)

OUTSIDE_FAMILIES = [f.value for f in SurvivorFamily]
SIGNAL_BASES = [f.value for f in BaseFamily]


# =============================================================================
# LINE ANCHORS
# =============================================================================

def _key_lines(text: str, doc: Any) -> Dict[str, int]:
    """Map each dotted key path to the line its key appears on."""
    paths_by_key: Dict[str, List[str]] = defaultdict(list)

    def walk(node, path):
        if isinstance(node, dict):
            for key, value in node.items():
                child = f"{path}.{key}" if path else key
                paths_by_key[key].append(child)
                walk(value, child)
        elif isinstance(node, list):
            for i, value in enumerate(node):
                walk(value, f"{path}[{i}]")

    walk(doc, '')
    lines = {}
    for key, paths in paths_by_key.items():
        positions = [m.start() for m in re.finditer(r'"%s"\s*:' % re.escape(key), text)]
        for path, pos in zip(paths, positions):
            lines[path] = text.count('\n', 0, pos) + 1
    return lines


class _Problems:
    def __init__(self, lines: Dict[str, int]):
        self.lines = lines
        self.items: List[str] = []

    def add(self, path: str, message: str):
        anchor = path
        while anchor and anchor not in self.lines:
            anchor = anchor.rsplit('.', 1)[0] if '.' in anchor else ''
        line = self.lines.get(anchor)
        prefix = f"line {line}: " if line else ""
        self.items.append(f"{prefix}{path}: {message}")


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


# =============================================================================
# VALIDATION
# =============================================================================

def _check_schema(doc: Any, problems: _Problems) -> None:
    if not isinstance(doc, dict):
        problems.add('', 'top level must be an object')
        return
    for key in doc:
        if key not in ('groups', 'inspection', 'name'):
            problems.add(key, 'unknown key')
    if 'name' in doc and not isinstance(doc['name'], str):
        problems.add('name', 'must be a string')

    groups = doc.get('groups')
    if not isinstance(groups, list) or len(groups) != 2:
        problems.add('groups', 'must be an array of exactly two groups')
        groups = groups if isinstance(groups, list) else []

    for i, group in enumerate(groups):
        path = f"groups[{i}]"
        if not isinstance(group, dict):
            problems.add(path, 'must be an object')
            continue
        if not isinstance(group.get('name'), str):
            problems.add(f"{path}.name", 'required string')
        if not _is_number(group.get('population')):
            problems.add(f"{path}.population", 'required number')

        outside = group.get('outside_option')
        if not isinstance(outside, dict):
            problems.add(f"{path}.outside_option", 'required object')
        else:
            family = outside.get('family')
            if family not in OUTSIDE_FAMILIES:
                problems.add(f"{path}.outside_option.family", f"must be one of {OUTSIDE_FAMILIES}")
            shape = 'p' if family == 'power' else 'sigma'
            for key in ('mu', shape):
                if not _is_number(outside.get(key)):
                    problems.add(f"{path}.outside_option.{key}", 'required number')

        signal = group.get('signal')
        if not isinstance(signal, dict):
            problems.add(f"{path}.signal", 'required object')
        else:
            base = signal.get('base')
            if base not in SIGNAL_BASES:
                problems.add(f"{path}.signal.base", f"must be one of {SIGNAL_BASES}")
            required = ['mu', 'sigma', 'crime_shift']
            if base == 'two_piece_normal':
                required += ['sigma_left', 'sigma_right']
            for key in required:
                if not _is_number(signal.get(key)):
                    problems.add(f"{path}.signal.{key}", 'required number')
            if 'mode' in signal and not _is_number(signal['mode']):
                problems.add(f"{path}.signal.mode", 'must be a number')

    if 'inspection' in doc:
        inspection = doc['inspection']
        if not isinstance(inspection, dict) or not _is_number(inspection.get('capacity')):
            problems.add('inspection.capacity', 'required number')


def _check_invariants(doc: Dict, problems: _Problems) -> None:
    total = 0.0
    for i, group in enumerate(doc['groups']):
        path = f"groups[{i}]"
        if not group['population'] > 0:
            problems.add(f"{path}.population", f"must be > 0, got {group['population']}")
        total += group['population']
        outside = group['outside_option']
        shape = 'p' if outside['family'] == 'power' else 'sigma'
        if not outside[shape] > 0:
            problems.add(f"{path}.outside_option.{shape}", f"must be > 0, got {outside[shape]}")
        signal = group['signal']
        for key in ('sigma', 'crime_shift', 'sigma_left', 'sigma_right'):
            if key in signal and not signal[key] > 0:
                problems.add(f"{path}.signal.{key}", f"must be > 0, got {signal[key]}")
    if 'inspection' in doc:
        capacity = doc['inspection']['capacity']
        if not capacity > 0:
            problems.add('inspection.capacity', f"must be > 0, got {capacity}")
        elif capacity >= total:
            problems.add(
                'inspection.capacity',
                f"{capacity} must be below N_1 + N_2 = {total} (search capacity is limited)",
            )


def _build(doc: Dict) -> Scenario:
    groups = []
    for group in doc['groups']:
        outside = group['outside_option']
        if outside['family'] == 'power':
            H = SurvivorFunction.power(outside['mu'], outside['p'])
        else:
            H = SurvivorFunction(SurvivorFamily(outside['family']), float(outside['mu']), sigma=float(outside['sigma']))
        signal = group['signal']
        if signal['base'] == 'two_piece_normal':
            base = BaseDensity.two_piece_normal(signal.get('mode', 0.0), signal['sigma_left'], signal['sigma_right'])
        else:
            base = BaseDensity(BaseFamily(signal['base']))
        sig = SignalStructure(base, float(signal['mu']), float(signal['sigma']), float(signal['crime_shift']))
        groups.append(Group(group['name'], float(group['population']), H, sig))
    capacity = doc.get('inspection', {}).get('capacity')
    return Scenario(
        groups=tuple(groups),
        inspection_capacity=None if capacity is None else float(capacity),
        name=doc.get('name', 'scenario'),
    )


def scenario_from_dict(doc: Any, text: Optional[str] = None) -> Scenario:
    """
    Validate a decoded scenario document and build the Scenario.

    Raises:
        SchemaError: structural problems (missing keys, wrong types)
        InvariantError: values outside their domain
    """
    lines = _key_lines(text, doc) if text is not None else {}
    problems = _Problems(lines)
    _check_schema(doc, problems)
    if problems.items:
        raise SchemaError(problems.items)
    _check_invariants(doc, problems)
    if problems.items:
        raise InvariantError(problems.items)
    return _build(doc)


def parse_scenario(path: str) -> Scenario:
    """
    Load and validate a scenario file.

    Raises:
        ScenarioFileError: file missing or unreadable
        SchemaError: invalid JSON or structure
        InvariantError: parameter values violate model invariants
    """
    if not os.path.isfile(path):
        raise ScenarioFileError(f"Scenario file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as exc:
        raise ScenarioFileError(f"Cannot read scenario file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([f"line {exc.lineno}: invalid JSON: {exc.msg}"]) from exc
    scenario = scenario_from_dict(doc, text)
    logger.info(f"[LOAD] {path}: scenario '{scenario.name}'")
    return scenario


# =============================================================================
# SERIALIZATION
# =============================================================================

def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    groups = []
    for group in scenario.groups:
        H = group.outside_option
        outside = {'family': H.family.value, 'mu': H.mu}
        if H.family is SurvivorFamily.POWER:
            outside['p'] = H.p
        else:
            outside['sigma'] = H.sigma
        sig = group.signal
        signal = {'base': sig.base.family.value, 'mu': sig.mu, 'sigma': sig.sigma, 'crime_shift': sig.crime_shift}
        if sig.base.family is BaseFamily.TWO_PIECE_NORMAL:
            signal.update(mode=sig.base.mode, sigma_left=sig.base.sigma_left, sigma_right=sig.base.sigma_right)
        groups.append({
            'name': group.name,
            'population': group.population,
            'outside_option': outside,
            'signal': signal,
        })
    doc = {'name': scenario.name, 'groups': groups}
    if scenario.inspection_capacity is not None:
        doc['inspection'] = {'capacity': scenario.inspection_capacity}
    return doc


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + '\n'


def write_scenario(scenario: Scenario, path: str) -> str:
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(dump_scenario(scenario))
    return path


def with_parameter(scenario: Scenario, dotted_path: str, value: float) -> Scenario:
    """
    Copy of the scenario with one serialized field replaced.

    Paths use 0-based list indices, e.g. 'groups.1.outside_option.mu'
    or 'inspection.capacity'.
    """
    doc = copy.deepcopy(scenario_to_dict(scenario))
    parts = dotted_path.split('.')
    node = doc
    for i, part in enumerate(parts[:-1]):
        if isinstance(node, list):
            if not part.isdigit() or int(part) >= len(node):
                raise SchemaError([f"{dotted_path}: no list index '{part}'"])
            node = node[int(part)]
        elif isinstance(node, dict):
            if part not in node:
                if part == 'inspection' and i == 0:
                    node[part] = {}
                else:
                    raise SchemaError([f"{dotted_path}: no key '{part}'"])
            node = node[part]
        else:
            raise SchemaError([f"{dotted_path}: '{part}' is not a container"])
    leaf = parts[-1]
    if not isinstance(node, dict) or (leaf not in node and dotted_path != 'inspection.capacity'):
        raise SchemaError([f"{dotted_path}: no numeric field '{leaf}'"])
    node[leaf] = float(value)
    return scenario_from_dict(doc)


def load_policy_file(path: str) -> Tuple[ThresholdPolicy, Optional[InspectionProfile]]:
    """Read {"thresholds": [T1, T2], "intensities": [theta1, theta2]} (intensities optional)."""
    if not os.path.isfile(path):
        raise ScenarioFileError(f"Policy file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise SchemaError([f"line {exc.lineno}: invalid JSON: {exc.msg}"]) from exc
    thresholds = doc.get('thresholds') if isinstance(doc, dict) else None
    if not (isinstance(thresholds, list) and len(thresholds) == 2 and all(_is_number(t) for t in thresholds)):
        raise SchemaError(["thresholds: required array of two numbers"])
    intensities = doc.get('intensities')
    profile = None
    if intensities is not None:
        if not (isinstance(intensities, list) and len(intensities) == 2 and all(_is_number(t) for t in intensities)):
            raise SchemaError(["intensities: must be an array of two numbers"])
        profile = InspectionProfile(tuple(intensities))
    return ThresholdPolicy(tuple(thresholds)), profile
