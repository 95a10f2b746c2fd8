import os

import numpy as np
import pytest

import main
from config import settings
from config.scenarios import get_scenario
from export import MANIFEST_NAME, RunManifest, load_manifest, read_json, write_csv, write_json
from pipeline import MissingReportError, build_symbol, make_run_dir, render_run, run_scenario, verify_run
from symbols import DoubleBump, MatrixSymbol, Quartic2D


def _scenario(name, **overrides):
    config = get_scenario(name)
    config.update(overrides)
    return config


# =============================================================================
# SYMBOLS AND RUN DIRECTORIES
# =============================================================================

def test_build_symbol_per_family():
    s, matrix = build_symbol(get_scenario('double_bump'))
    assert isinstance(s, DoubleBump) and matrix is None
    s, matrix = build_symbol(get_scenario('quartic'))
    assert isinstance(s, Quartic2D) and s.lam == 18.0
    s, matrix = build_symbol(get_scenario('matrix'))
    assert isinstance(matrix, MatrixSymbol)


def test_matrix_symbol_follows_the_scenario():
    config = _scenario('matrix', DELTA=0.3, COUPLING_EPS=0.05, LAMBDA=150.0)
    branch, matrix = build_symbol(config)
    assert (matrix.n, matrix.delta, matrix.eps, matrix.lam) == (1, 0.3, 0.05, 150.0)
    assert branch.matrix is matrix


def test_pseudo_window_is_attached():
    s, _ = build_symbol(get_scenario('double_bump_absorbed'))
    assert s.absorption.mode == 'pseudo_window'
    assert s.absorbs(np.array([0.0, 0.0, -1.0, 0.0]))


def test_potential_window_needs_a_tilt():
    with pytest.raises(ValueError, match='TILT_EPS'):
        build_symbol(_scenario('double_bump', ABSORPTION='potential_window'))


def test_run_dir_name(tmp_path):
    run_dir = make_run_dir(_scenario('double_bump', SEED=11), str(tmp_path))
    assert run_dir == os.path.join(str(tmp_path), 'double_bump_seed11')
    assert os.path.isdir(run_dir)


# =============================================================================
# RUNNER
# =============================================================================

def test_empty_stage_list_writes_config_and_manifest(tmp_path):
    manifest = run_scenario(_scenario('double_bump', STAGES=()), str(tmp_path))
    assert manifest.exit_code == 0
    stored = load_manifest(str(tmp_path))
    assert list(stored['artifacts']) == ['config.json']
    assert stored['config']['scenario_name'] == 'double_bump'


def test_stage_failure_stops_the_run(tmp_path):
    manifest = run_scenario(_scenario('double_bump', STAGES=('heteroclinic', 'reversal')), str(tmp_path))
    assert manifest.exit_code == 1
    assert 'need two hyperbolic fixed points' in manifest.failures['heteroclinic']
    assert 'reversal' not in manifest.stage_times
    assert os.path.exists(os.path.join(str(tmp_path), 'manifest.json'))


def test_fixed_points_and_reversal_run(tmp_path):
    manifest = run_scenario(_scenario('double_bump', STAGES=('fixed_points', 'reversal')), str(tmp_path))
    assert manifest.failures == {}
    assert manifest.verdicts == {'reversal': True}
    assert manifest.exit_code == 0
    assert 'fixed_points.csv' in manifest.artifacts

    result = verify_run(str(tmp_path))
    assert result.passed

    with open(os.path.join(str(tmp_path), 'fixed_points.csv'), 'a', encoding='utf-8') as handle:
        handle.write('\n')
    result = verify_run(str(tmp_path))
    assert result.checks['artifact_hashes'] is False
    assert result.exit_code == 2


def test_absorbed_run_finds_no_return_orbit(tmp_path):
    manifest = run_scenario(_scenario('double_bump_absorbed', STAGES=('fixed_points', 'heteroclinic')),
                            str(tmp_path))
    assert manifest.failures == {}
    assert manifest.verdicts == {'absorbed_return': True}
    counts = read_json(str(tmp_path / 'heteroclinic.json'))['counts']
    assert counts['backward'] == 0 and counts['forward'] > 0


@pytest.mark.parametrize("d, overrides", [
    (1.0, {}),
    (1.2, {}),
    (1.5, {}),
    (1.8, {}),
    (2.0, {'FRACTAL_RES_DIVISOR': 256}),
])
def test_fractal_stage_recovers_the_target_dimension(tmp_path, d, overrides):
    config = _scenario('double_bump_fractal', D=d, STAGES=('fractal',), **overrides)
    manifest = run_scenario(config, str(tmp_path))
    assert manifest.failures == {}
    assert manifest.verdicts['fractal_dimension'] is True
    summary = read_json(str(tmp_path / 'fractal.json'))
    assert abs(summary['dimension']['fitted_dim'] - d) <= summary['dimension_tol']
    assert summary['dimension_tol'] == (0.1 if d == 2.0 else 0.15)


def test_filled_sheet_fits_exactly_two(tmp_path):
    config = _scenario('double_bump_fractal', D=2.0, STAGES=('fractal',), FRACTAL_RES_DIVISOR=256)
    run_scenario(config, str(tmp_path))
    summary = read_json(str(tmp_path / 'fractal.json'))
    assert summary['dimension']['fitted_dim'] == pytest.approx(2.0, abs=1e-6)


def test_reruns_with_one_seed_are_byte_identical(tmp_path):
    config = _scenario('double_bump_fractal', SEED=3, STAGES=('fixed_points', 'fractal'),
                       FRACTAL_RES_DIVISOR=256)
    first, second = tmp_path / 'first', tmp_path / 'second'
    run_scenario(config, str(first))
    run_scenario(config, str(second))

    names = sorted(p.name for p in first.iterdir() if p.is_file() and p.name != MANIFEST_NAME)
    assert names == sorted(p.name for p in second.iterdir() if p.is_file() and p.name != MANIFEST_NAME)
    assert 'fractal.json' in names and 'fixed_points.csv' in names
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert load_manifest(str(first))['artifacts'] == load_manifest(str(second))['artifacts']


# =============================================================================
# VERIFY AND RENDER FROM FILES
# =============================================================================

def _synthetic_run(run_dir, stages, config=None, failed=()):
    manifest = RunManifest(str(run_dir), dict(config or {}, STAGES=list(stages), SYMBOL='double_bump'))
    for stage in stages:
        manifest.record_stage(stage, 0.1)
    for stage in failed:
        manifest.record_failure(stage, RuntimeError('stopped'))
    return manifest


def _margin_rows(ratios):
    return [{'x1': 0.1 * k, 'x2': 0.0, 'xi1': 1.0, 'xi2': 0.0, 'value': r, 'distance': 1.0,
             'ratio': r, 'failure': not r > 0} for k, r in enumerate(ratios)]


def _identities(worst=1e-9):
    return {'identities': {'lines': 2, 'F_spread': 1e-10, 'g1_mismatch': 1e-12, 'g2_mismatch': 3e-12,
                           'bracket_residual': worst, 'tol': 1e-6}}


def test_verify_flags_a_failed_margin(tmp_path):
    manifest = _synthetic_run(tmp_path, ['escape'])
    manifest.add_artifact(write_csv(_margin_rows([0.5, -0.1, 0.3]), str(tmp_path / 'escape_margin.csv')))
    manifest.add_artifact(write_json(_identities(), str(tmp_path / 'escape.json')))
    manifest.write()
    result = verify_run(str(tmp_path))
    assert result.checks['artifact_hashes']
    assert result.checks['margin:escape_margin.csv'] is False
    assert result.checks['escape_identities'] is True
    assert result.details['margin:escape_margin.csv']['failures'] == 1
    assert result.exit_code == 2


def test_verify_flags_broken_escape_identities(tmp_path):
    manifest = _synthetic_run(tmp_path, ['escape'])
    manifest.add_artifact(write_csv(_margin_rows([0.5, 0.3]), str(tmp_path / 'escape_margin.csv')))
    manifest.add_artifact(write_json(_identities(worst=2e-3), str(tmp_path / 'escape.json')))
    manifest.write()
    result = verify_run(str(tmp_path))
    assert result.checks['margin:escape_margin.csv'] is True
    assert result.checks['escape_identities'] is False
    assert result.details['escape_identities']['worst'] == pytest.approx(2e-3)
    assert result.exit_code == 2


def test_verify_checks_trapped_distance_and_dimension(tmp_path):
    manifest = _synthetic_run(tmp_path, ['trapped_set', 'fractal'], config={'D': 1.5})
    trapped = [{'x1': 0.0, 'x2': 0.0, 'xi1': 0.5, 'xi2': 0.0, 'verdict': 'trapped', 'distance': 1e-4},
               {'x1': 3.0, 'x2': 0.0, 'xi1': 1.0, 'xi2': 0.0, 'verdict': 'escaped', 'distance': 2.0}]
    counts = [{'scale': 0.5 ** k, 'count': int(round(2 ** (1.5 * k))), 'in_window': 2 <= k <= 6}
              for k in range(9)]
    manifest.add_artifact(write_csv(trapped, str(tmp_path / 'trapped_set.csv')))
    manifest.add_artifact(write_csv(counts, str(tmp_path / 'box_counts.csv')))
    manifest.add_artifact(write_csv([{'x2': -0.01}, {'x2': 0.02}], str(tmp_path / 'fiber.csv')))
    manifest.add_artifact(write_json({'dimension': {'fitted_dim': 1.52}, 'target_dim': 1.5},
                                     str(tmp_path / 'fractal.json')))
    manifest.write()

    result = verify_run(str(tmp_path))
    assert result.passed, result.checks
    assert set(result.checks) == {'artifact_hashes', 'trapped_distance', 'box_counts_monotone',
                                  'dimension_window', 'dimension_target', 'fiber_nonempty'}

    figures = render_run(str(tmp_path))
    assert sorted(os.path.basename(p) for p in figures) == ['dimension_fit.svg', 'trapped_cloud.svg']
    assert all(os.path.dirname(p) == str(tmp_path / 'figures') for p in figures)


def test_failed_stages_are_not_checked(tmp_path):
    manifest = _synthetic_run(tmp_path, ['escape'], failed=['escape'])
    manifest.write()
    result = verify_run(str(tmp_path))
    assert list(result.checks) == ['artifact_hashes']
    assert render_run(str(tmp_path)) == []


def test_missing_reports_raise(tmp_path):
    with pytest.raises(MissingReportError):
        verify_run(str(tmp_path))
    _synthetic_run(tmp_path, ['quartic_escape']).write()
    with pytest.raises(MissingReportError) as caught:
        verify_run(str(tmp_path))
    assert caught.value.name == 'quartic_margin.csv'


# =============================================================================
# COMMAND LINE
# =============================================================================

def test_cli_run_then_verify(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, 'OUTPUT_DIR', str(tmp_path / 'default'))
    scenario = tmp_path / 'scenario.yaml'
    scenario.write_text("SCENARIO: double_bump\nSEED: 5\nSTAGES: [fixed_points]\n", encoding='utf-8')
    out = tmp_path / 'out'
    assert main.main(['run', str(scenario), '--output-dir', str(out)]) == 0
    run_dir = out / 'double_bump_seed5'
    assert (run_dir / 'fixed_points.csv').exists()
    assert main.main(['verify', str(run_dir)]) == 0
    assert main.main(['render', str(run_dir)]) == 0


def test_cli_reports_bad_inputs(tmp_path):
    scenario = tmp_path / 'scenario.yaml'
    scenario.write_text("SCENARIO: double_bump\nGRID: 3\n", encoding='utf-8')
    assert main.main(['run', str(scenario)]) == 1
    assert main.main(['verify', str(tmp_path / 'nowhere')]) == 1
    assert main.main(['render', str(tmp_path / 'nowhere')]) == 1
