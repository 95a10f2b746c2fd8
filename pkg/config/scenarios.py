"""
Scenario Definitions
====================
Named parameter sets for the shipped examples and the YAML scenario files.

Each scenario is a dict of UPPER_CASE parameters plus a 'scenario_name'
entry. A scenario file selects one of them with `SCENARIO: <name>` and
overrides any parameter with `KEY: value` entries:

    # absorbed double bump, small run
    SCENARIO: double_bump_absorbed
    SEED: 7
    SHELL_SAMPLES: 2000
    ABSORPTION_CENTER: [0.0, 0.0, -1.0, 0.0]

Keys ending in `_SWEEP` hold tuples; `generate_scenario_sets` expands them
into one scenario per combination.
"""

import math
import re
from copy import deepcopy
from itertools import product

import yaml

# =============================================================================
# COMMON PARAMETERS
# =============================================================================
COMMON_PARAMETERS = {
    'SEED': 20240601,
    'WORKERS': None,  # None: settings.WORKERS
    'HORIZON': 200.0,
    'INTEGRATOR_TOL': 1e-11,
    'SHELL_SAMPLES': 2000,
    'ENERGY_WINDOW': 0.05,
    'STAGES': (),
}

# =============================================================================
# DOUBLE BUMP (two radial barriers, heteroclinics both ways)
# =============================================================================
DOUBLE_BUMP_SCENARIO = {
    **COMMON_PARAMETERS,
    'scenario_name': 'double_bump',
    'SYMBOL': 'double_bump',
    'E0': 1.0,
    'BARRIER_RADIUS': 1.0,
    'HALF_SEPARATION': 2.0,
    'TILT_EPS': 0.0,
    'TILT_INNER': 0.25,
    'TILT_OUTER': 0.5,
    'ABSORPTION': 'none',
    'ABSORPTION_CENTER': (0.0, 0.0, -1.0, 0.0),
    'ABSORPTION_RADIUS': 0.3,
    'ABSORPTION_STRENGTH': 1.0,
    'SHELL_DIRECTIONS': 48,
    'IMPACT_PARAMETERS': 41,
    'STAGES': ('fixed_points', 'trapped_set', 'heteroclinic', 'reversal',
               'scattering', 'manifolds'),
}

DOUBLE_BUMP_ABSORBED_SCENARIO = {
    **DOUBLE_BUMP_SCENARIO,
    'scenario_name': 'double_bump_absorbed',
    'ABSORPTION': 'pseudo_window',
    'SHELL_SAMPLES': 10000,
    'STAGES': ('fixed_points', 'trapped_set', 'heteroclinic', 'escape'),
}

DOUBLE_BUMP_FRACTAL_SCENARIO = {
    **DOUBLE_BUMP_SCENARIO,
    'scenario_name': 'double_bump_fractal',
    'ABSORPTION': 'pseudo_window',
    'D': 1.5,
    'CANTOR_DEPTH': 10,
    'PHASE_NU': 0.05,
    'NU_LADDER': (0.1, 0.05, 0.025),
    'FRACTAL_RES_DIVISOR': 2048,
    'BOX_SCALES': 12,
    'GRONWALL_STARTS': 16,
    'GRONWALL_TIME': 2.0,
    'STAGES': ('fixed_points', 'fractal', 'scaling', 'gronwall'),
}

DEGREE_DIAG_SCENARIO = {
    **DOUBLE_BUMP_SCENARIO,
    'scenario_name': 'degree_diag',
    'DEGREE_EPS': 0.05,
    'DEGREE_LAUNCHES': 256,
    'DEGREE_TIMES': (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0),
    'STAGES': ('fixed_points', 'degree'),
}

# =============================================================================
# FOURTH-ORDER SYMBOL
# =============================================================================
QUARTIC_SCENARIO = {
    **COMMON_PARAMETERS,
    'scenario_name': 'quartic',
    'SYMBOL': 'quartic',
    'E0': 0.0,
    'LAMBDA': 18.0,
    'F_AMPLITUDE': 1.0,
    'F_OUTER': 1.0,
    'K_DEPTH': 1.0,
    'K_OUTER': 3.0,
    'CHI_INNER': 0.5,
    'CHI_OUTER': 1.0,
    'WINDOW_INNER': 0.1,
    'WINDOW_OUTER': 0.3,
    'COMPACT_RADIUS': 4.0,
    'HORIZON': 80.0,
    'CONVEXITY_STARTS': 24,
    'CONVEXITY_TIME': 5.0,
    'STAGES': ('fixed_points', 'trapped_set', 'heteroclinic', 'quartic_escape',
               'convexity'),
}

QUARTIC_FRACTAL_SCENARIO = {
    **QUARTIC_SCENARIO,
    'scenario_name': 'quartic_fractal',
    'E0': 1.0,
    'D': 1.5,
    'CANTOR_DEPTH': 10,
    'PHASE_NU': 0.05,
    'NU_LADDER': (0.1, 0.05, 0.025),
    'FRACTAL_RES_DIVISOR': 2048,
    'BOX_SCALES': 12,
    'STAGES': ('fixed_points', 'fractal', 'scaling'),
}

# =============================================================================
# MATRIX-VALUED SYMBOL
# =============================================================================
MATRIX_SCENARIO = {
    **COMMON_PARAMETERS,
    'scenario_name': 'matrix',
    'SYMBOL': 'matrix',
    'E0': 0.0,
    'DELTA': 0.2,
    'COUPLING_EPS': 0.1,
    'LAMBDA': 200.0,
    'ESCAPE_DELTA': 0.005,
    'SURFACE_WINDOW': (-2.0, 2.0, -3.0, 3.0),
    'SURFACE_RESOLUTION': 801,
    'HORIZON': 80.0,
    'STAGES': ('fixed_points', 'matrix_surface', 'heteroclinic', 'matrix_escape'),
}

# =============================================================================
# REGISTRY
# =============================================================================
SCENARIOS = {
    scenario['scenario_name']: scenario
    for scenario in (
        DOUBLE_BUMP_SCENARIO,
        DOUBLE_BUMP_ABSORBED_SCENARIO,
        DOUBLE_BUMP_FRACTAL_SCENARIO,
        QUARTIC_SCENARIO,
        QUARTIC_FRACTAL_SCENARIO,
        MATRIX_SCENARIO,
        DEGREE_DIAG_SCENARIO,
    )
}

# Symbol dimension per symbol family (D must lie in [1, n])
SYMBOL_DIMENSIONS = {'double_bump': 2, 'quartic': 2, 'matrix': 2}

KNOWN_STAGES = (
    'fixed_points', 'trapped_set', 'heteroclinic', 'manifolds', 'reversal',
    'scattering', 'escape', 'quartic_escape', 'convexity', 'matrix_surface',
    'matrix_escape', 'fractal', 'scaling', 'gronwall', 'degree',
)

TOLERANCE_KEYS = ('INTEGRATOR_TOL', 'ENERGY_WINDOW')

# PyYAML reads 1e-11 as a string; it needs a dot for floats
_EXPONENT_FLOAT = re.compile(r"[-+]?\d+(\.\d*)?[eE][-+]?\d+")


def get_scenario(name: str) -> dict:
    """
    Return a deep copy of a registered scenario.

    Args:
        name: Scenario name (see SCENARIOS)

    Returns:
        Scenario parameter dictionary
    """
    if name not in SCENARIOS:
        raise ValueError(f"Unknown scenario '{name}'. Available: {sorted(SCENARIOS)}")
    return deepcopy(SCENARIOS[name])


def _coerce(value):
    """YAML sequences become tuples; exponent floats without a dot (1e-11) become floats."""
    if isinstance(value, list):
        return tuple(_coerce(item) for item in value)
    if isinstance(value, str) and _EXPONENT_FLOAT.fullmatch(value.strip()):
        return float(value)
    return value


def parse_scenario_file(path: str) -> dict:
    """
    Read a YAML scenario file.

    The document must be a mapping of `KEY: value` entries; keys are
    upper-cased and sequences are returned as tuples.

    Args:
        path: Path to the scenario file

    Returns:
        Dictionary of parsed values keyed by upper-cased names

    Raises:
        ValueError: Malformed YAML (with the line number), a document that
            is not a mapping, or a non-string key
    """
    with open(path, 'r', encoding='utf-8') as handle:
        try:
            document = yaml.safe_load(handle)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            where = f" line {mark.line + 1}:" if mark is not None else ''
            problem = getattr(e, 'problem', None) or str(e)
            raise ValueError(f"{path}:{where} {problem}") from e

    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ValueError(f"{path}: expected a mapping of 'KEY: value' entries, got {type(document).__name__}")

    values = {}
    for key, value in document.items():
        if not isinstance(key, str) or not key.strip():
            raise ValueError(f"{path}: keys must be non-empty names, got {key!r}")
        values[key.strip().upper()] = _coerce(value)
    return values


def validate_scenario(config: dict) -> dict:
    """
    Check a merged scenario for out-of-range values.

    Args:
        config: Scenario dictionary

    Returns:
        The same dictionary (for chaining)
    """
    for key in TOLERANCE_KEYS:
        if key in config and not (isinstance(config[key], (int, float)) and config[key] > 0):
            raise ValueError(f"{key} must be a positive number, got {config[key]!r}")

    if 'D' in config:
        n = SYMBOL_DIMENSIONS.get(config.get('SYMBOL'), 2)
        d = config['D']
        if not isinstance(d, (int, float)) or not (1.0 <= d <= n):
            raise ValueError(f"D must lie in [1, {n}], got {d!r}")

    for key in ('E0', 'BARRIER_RADIUS', 'HALF_SEPARATION'):
        if config.get('SYMBOL') == 'double_bump' and config.get(key, 1.0) <= 0:
            raise ValueError(f"{key} must be positive, got {config[key]!r}")

    if config.get('SYMBOL') == 'double_bump':
        if config['HALF_SEPARATION'] < config['BARRIER_RADIUS']:
            raise ValueError("HALF_SEPARATION must be at least BARRIER_RADIUS (barriers overlap)")
        if config['ABSORPTION'] not in ('none', 'pseudo_window', 'potential_window'):
            raise ValueError(f"Unknown ABSORPTION mode {config['ABSORPTION']!r}")
        if config['ABSORPTION_STRENGTH'] <= 0:
            raise ValueError("ABSORPTION_STRENGTH must be positive")

    if config.get('SYMBOL') == 'quartic':
        if config['F_OUTER'] > 1.0 or config['K_OUTER'] > 3.0:
            raise ValueError("quartic profiles must satisfy F_OUTER <= 1 and K_OUTER <= 3")
        if config['LAMBDA'] <= -1.25:
            raise ValueError(f"LAMBDA must exceed -5/4, got {config['LAMBDA']!r}")

    if 'PHASE_NU' in config and not (0.02 <= config['PHASE_NU'] <= 0.2):
        raise ValueError(f"PHASE_NU must lie in [0.02, 0.2], got {config['PHASE_NU']!r}")

    for stage in config.get('STAGES', ()):
        if stage not in KNOWN_STAGES:
            raise ValueError(f"Unknown stage '{stage}'. Available: {list(KNOWN_STAGES)}")

    if not isinstance(config.get('SEED'), int):
        raise ValueError(f"SEED must be an integer, got {config.get('SEED')!r}")
    if not isinstance(config.get('SHELL_SAMPLES'), int) or config['SHELL_SAMPLES'] < 1:
        raise ValueError(f"SHELL_SAMPLES must be a positive integer, got {config.get('SHELL_SAMPLES')!r}")
    if not math.isfinite(config.get('HORIZON', 1.0)) or config.get('HORIZON', 1.0) <= 0:
        raise ValueError(f"HORIZON must be positive, got {config.get('HORIZON')!r}")

    return config


def build_scenario_config(path: str) -> dict:
    """
    Merge a scenario file over the defaults of the scenario it names.

    Args:
        path: Path to the YAML scenario file

    Returns:
        Validated scenario dictionary
    """
    overrides = parse_scenario_file(path)
    name = overrides.pop('SCENARIO', None)
    if name is None:
        raise ValueError(f"{path}: missing 'SCENARIO: <name>' entry")

    config = get_scenario(str(name))
    unknown = [key for key in overrides if key not in config and not key.endswith('_SWEEP')]
    if unknown:
        raise ValueError(f"{path}: unknown parameters {unknown} for scenario '{name}'")
    config.update(overrides)
    return validate_scenario(config)


def generate_scenario_sets(config: dict) -> list[dict]:
    """
    Expand `<KEY>_SWEEP` tuples into one scenario per combination.

    Args:
        config: Scenario dictionary, possibly holding sweep keys

    Returns:
        List of scenario dictionaries without sweep keys
    """
    sweep_keys = sorted(key for key in config if key.endswith('_SWEEP'))
    if not sweep_keys:
        return [config]

    base = {key: value for key, value in config.items() if key not in sweep_keys}
    ranges = [tuple(config[key]) if isinstance(config[key], (tuple, list)) else (config[key],)
              for key in sweep_keys]

    scenarios = []
    for combo in product(*ranges):
        scenario = deepcopy(base)
        suffix = []
        for key, value in zip(sweep_keys, combo):
            target = key[:-len('_SWEEP')]
            scenario[target] = value
            suffix.append(f"{target}{value}")
        scenario['scenario_name'] = f"{base['scenario_name']}_{'_'.join(suffix)}"
        scenarios.append(validate_scenario(scenario))
    return scenarios
