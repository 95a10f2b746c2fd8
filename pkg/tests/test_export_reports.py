import os

import numpy as np
import pandas as pd
import pytest

from export import (
    RunManifest,
    get_dimension_order_query,
    get_dimension_window_query,
    get_margin_summary_query,
    get_trapped_summary_query,
    hash_mismatches,
    load_manifest,
    plot_dimension_fit,
    points_frame,
    read_json,
    run_query,
    write_csv,
    write_json,
)


def test_json_is_sorted_and_nulls_non_finite(tmp_path):
    path = write_json({'b': np.float64(np.nan), 'a': [np.inf, 1.5], 'c': np.int64(3)},
                      str(tmp_path / 'report.json'), quiet=True)
    text = open(path, encoding='utf-8').read()
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert read_json(path) == {'a': [None, 1.5], 'b': None, 'c': 3}


def test_json_floats_round_trip_exactly(tmp_path):
    values = [0.1, 1.0 / 3.0, np.float64(2.0) ** -40, 6.02214076e23]
    path = write_json({'values': values}, str(tmp_path / 'floats.json'), quiet=True)
    assert read_json(path)['values'] == [float(v) for v in values]


def test_json_output_is_byte_stable(tmp_path):
    payload = {'z': {'y': 1.25, 'x': [1, 2]}, 'a': True}
    first = write_json(payload, str(tmp_path / 'one.json'), quiet=True)
    second = write_json(dict(reversed(list(payload.items()))), str(tmp_path / 'two.json'), quiet=True)
    assert open(first, 'rb').read() == open(second, 'rb').read()


def test_csv_uses_seventeen_significant_digits(tmp_path):
    path = write_csv([{'x': 0.1, 'label': 'a'}], str(tmp_path / 'rows.csv'), columns=['label', 'x'], quiet=True)
    lines = open(path, encoding='utf-8').read().splitlines()
    assert lines == ['label,x', 'a,0.10000000000000001']
    assert pd.read_csv(path)['x'].iloc[0] == 0.1


def test_points_frame_labels():
    frame = points_frame(np.zeros((3, 4)), distance=[0.0, 1.0, 2.0])
    assert list(frame.columns) == ['x1', 'x2', 'xi1', 'xi2', 'distance']
    assert list(points_frame(np.zeros((2, 3))).columns) == ['c1', 'c2', 'c3']


@pytest.mark.parametrize('failures, verdicts, expected', [
    ({}, {}, 0),
    ({}, {'escape': True, 'reversal': True}, 0),
    ({}, {'escape': False}, 2),
    ({'escape': 'ValueError: bad'}, {'reversal': False}, 1),
])
def test_manifest_exit_codes(tmp_path, failures, verdicts, expected):
    manifest = RunManifest(str(tmp_path), {})
    manifest.failures.update(failures)
    manifest.verdicts.update(verdicts)
    assert manifest.exit_code == expected


def test_manifest_hashes_detect_tampering(tmp_path):
    report = write_csv([{'x': 1.0}], str(tmp_path / 'a.csv'), quiet=True)
    manifest = RunManifest(str(tmp_path), {'SEED': 1})
    manifest.add_artifact(report)
    manifest.add_artifact(report)
    manifest.record_stage('fixed_points', 0.5)
    manifest.record_failure('escape', RuntimeError('no shell samples'))
    manifest.write()

    stored = load_manifest(str(tmp_path))
    assert list(stored['artifacts']) == ['a.csv']
    assert stored['failures'] == {'escape': 'RuntimeError: no shell samples'}
    assert stored['exit_code'] == 1
    assert 'numpy' in stored['packages']
    assert hash_mismatches(str(tmp_path)) == []

    with open(report, 'a', encoding='utf-8') as handle:
        handle.write('2.0\n')
    assert hash_mismatches(str(tmp_path)) == ['a.csv']
    os.remove(report)
    assert hash_mismatches(str(tmp_path)) == ['a.csv']


def test_trapped_summary_query(tmp_path):
    path = write_csv([
        {'x1': 0.0, 'verdict': 'trapped', 'distance': 0.01},
        {'x1': 1.0, 'verdict': 'trapped', 'distance': 0.03},
        {'x1': 2.0, 'verdict': 'escaped', 'distance': 1.5},
    ], str(tmp_path / 'trapped_set.csv'), quiet=True)
    summary = run_query(get_trapped_summary_query(path))
    assert list(summary['verdict']) == ['escaped', 'trapped']
    assert summary.set_index('verdict').loc['trapped', 'max_distance'] == pytest.approx(0.03)
    assert int(summary.set_index('verdict').loc['trapped', 'samples']) == 2


def test_margin_summary_query_skips_missing_ratios(tmp_path):
    path = write_csv([
        {'value': 0.4, 'ratio': 0.4, 'failure': False},
        {'value': -0.2, 'ratio': -0.2, 'failure': True},
        {'value': 1.0, 'ratio': np.nan, 'failure': False},
    ], str(tmp_path / 'margin.csv'), quiet=True)
    row = run_query(get_margin_summary_query(path)).iloc[0]
    assert int(row['samples']) == 3
    assert int(row['failures']) == 1
    assert row['min_ratio'] == pytest.approx(-0.2)


def test_dimension_queries(tmp_path):
    rows = [{'scale': 0.5 ** k, 'count': c, 'in_window': 1 <= k <= 4}
            for k, c in enumerate([2, 4, 8, 7, 32, 64])]
    path = write_csv(rows, str(tmp_path / 'box_counts.csv'), quiet=True)
    disorder = run_query(get_dimension_order_query(path))
    # count 8 at scale 1/4 exceeds 7 at the finer 1/8
    assert list(disorder['scale']) == [0.25]
    window = run_query(get_dimension_window_query(path)).iloc[0]
    assert int(window['window_scales']) == 4
    assert window['window_high'] == pytest.approx(0.5)


def test_dimension_figure_is_deterministic(tmp_path):
    counts = pd.DataFrame({'scale': 0.5 ** np.arange(6), 'count': 2 ** np.arange(6),
                           'in_window': [False, True, True, True, True, False]})
    first = plot_dimension_fit(counts, 1.0, str(tmp_path / 'one.svg'))
    second = plot_dimension_fit(counts, 1.0, str(tmp_path / 'two.svg'))
    assert open(first, 'rb').read() == open(second, 'rb').read()
