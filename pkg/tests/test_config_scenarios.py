import glob
import os

import pytest

from config.scenarios import (
    SCENARIOS,
    build_scenario_config,
    generate_scenario_sets,
    get_scenario,
    parse_scenario_file,
    validate_scenario,
)

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config_files')


def _write(tmp_path, text):
    path = tmp_path / 'scenario.yaml'
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_parse_values_and_comments(tmp_path):
    path = _write(tmp_path, (
        "# comment line\n"
        "scenario: double_bump\n"
        "SEED: 7   # trailing comment\n"
        "E0: 1.5\n"
        "INTEGRATOR_TOL: 1e-11\n"
        "ABSORPTION: pseudo_window\n"
        "ABSORPTION_CENTER: [0.0, 0.0, -1.0, 0.0]\n"
        "STAGES: [fixed_points, trapped_set]\n"
        "WORKERS: null\n"
        "\n"
        "SHOW: yes\n"
    ))
    values = parse_scenario_file(path)
    assert values == {
        'SCENARIO': 'double_bump',
        'SEED': 7,
        'E0': 1.5,
        'INTEGRATOR_TOL': 1e-11,
        'ABSORPTION': 'pseudo_window',
        'ABSORPTION_CENTER': (0.0, 0.0, -1.0, 0.0),
        'STAGES': ('fixed_points', 'trapped_set'),
        'WORKERS': None,
        'SHOW': True,
    }


def test_empty_file_has_no_overrides(tmp_path):
    assert parse_scenario_file(_write(tmp_path, "# nothing yet\n")) == {}


@pytest.mark.parametrize('text, message', [
    ("SCENARIO: double_bump\nSTAGES: [fixed_points\n", r'scenario\.yaml: line \d+'),
    ("- double_bump\n- quartic\n", 'mapping'),
    ("SCENARIO: double_bump\n3: 4\n", 'non-empty names'),
])
def test_malformed_file_is_reported(tmp_path, text, message):
    with pytest.raises(ValueError, match=message):
        parse_scenario_file(_write(tmp_path, text))


def test_build_merges_over_named_defaults(tmp_path):
    path = _write(tmp_path, "SCENARIO: quartic\nLAMBDA: 20\nSTAGES: [fixed_points]\n")
    config = build_scenario_config(path)
    assert config['LAMBDA'] == 20
    assert config['STAGES'] == ('fixed_points',)
    assert config['WINDOW_OUTER'] == get_scenario('quartic')['WINDOW_OUTER']


@pytest.mark.parametrize('text, message', [
    ("SEED: 1\n", 'SCENARIO'),
    ("SCENARIO: nowhere\n", 'Unknown scenario'),
    ("SCENARIO: double_bump\nGRID: 4\n", 'unknown parameters'),
    ("SCENARIO: double_bump_fractal\nD: 2.5\n", 'D must lie'),
    ("SCENARIO: double_bump\nSTAGES: [fixed_points, warp]\n", 'Unknown stage'),
    ("SCENARIO: double_bump\nABSORPTION: sponge\n", 'ABSORPTION'),
    ("SCENARIO: double_bump\nHALF_SEPARATION: 0.5\n", 'overlap'),
    ("SCENARIO: double_bump_fractal\nPHASE_NU: 0.5\n", 'PHASE_NU'),
    ("SCENARIO: quartic\nK_OUTER: 4.0\n", 'quartic profiles'),
    ("SCENARIO: double_bump\nSEED: 1.5\n", 'SEED'),
])
def test_invalid_scenarios_rejected(tmp_path, text, message):
    with pytest.raises(ValueError, match=message):
        build_scenario_config(_write(tmp_path, text))


def test_sweep_expands_one_scenario_per_value(tmp_path):
    path = _write(tmp_path, "SCENARIO: double_bump_fractal\nD_SWEEP: [1.2, 1.8]\n")
    scenarios = generate_scenario_sets(build_scenario_config(path))
    assert [s['D'] for s in scenarios] == [1.2, 1.8]
    assert [s['scenario_name'] for s in scenarios] == ['double_bump_fractal_D1.2', 'double_bump_fractal_D1.8']
    assert all('D_SWEEP' not in s for s in scenarios)


def test_sweep_values_are_validated():
    config = dict(get_scenario('double_bump_fractal'), D_SWEEP=(1.5, 3.0))
    with pytest.raises(ValueError):
        generate_scenario_sets(config)


def test_registered_scenarios_validate():
    for name in SCENARIOS:
        assert validate_scenario(get_scenario(name))['scenario_name'] == name


def test_get_scenario_returns_a_copy():
    first = get_scenario('double_bump')
    first['E0'] = 99.0
    assert get_scenario('double_bump')['E0'] == 1.0


@pytest.mark.parametrize('path', sorted(glob.glob(os.path.join(CONFIG_DIR, '*.yaml'))))
def test_shipped_scenario_files_load(path):
    for scenario in generate_scenario_sets(build_scenario_config(path)):
        assert scenario['STAGES']


def test_dimension_sweep_file_targets():
    config = build_scenario_config(os.path.join(CONFIG_DIR, 'dimension_sweep.yaml'))
    assert [s['D'] for s in generate_scenario_sets(config)] == [1.2, 1.5, 1.8]
