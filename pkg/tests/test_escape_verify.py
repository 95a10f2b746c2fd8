import numpy as np
import pytest

from dynamics import convexity_check, find_fixed_points
from dynamics.manifolds import OUTGOING, AxisPatch, ChartRequest, generating_function
from escape import (
    fit_quartic_floor,
    matrix_surface_samples,
    quartic_shell_samples,
    verify_matrix_escape,
    verify_quartic_escape,
)
from symbols import MatrixSymbol


# =============================================================================
# QUARTIC
# =============================================================================
def test_quartic_floor_is_the_smaller_constant():
    floor = fit_quartic_floor(18.0)
    assert 0.0 < floor['nu'] <= 0.1
    assert floor['eps'] > 0.0
    assert floor['floor'] == min(floor['nu'], floor['eps'])


def test_quartic_shell_samples_solve_the_far_field(quartic):
    samples = quartic_shell_samples(18.0, 40, seed=1)
    assert samples.shape == (40, 4)
    assert np.all(np.maximum(np.abs(samples[:, 0]), np.abs(samples[:, 1])) >= 4.0)
    residual = [quartic.far_field(z) for z in samples]
    np.testing.assert_allclose(residual, 0.0, atol=1e-8)
    np.testing.assert_array_equal(samples, quartic_shell_samples(18.0, 40, seed=1))


def test_quartic_escape_is_positive_at_infinity(quartic):
    report = verify_quartic_escape(quartic, count=60, seed=2)
    assert report.kind == 'quartic'
    assert len(report.values) == len(report.samples)
    assert report.passed
    scale = max(1.0, float(np.max(np.abs(report.values))))
    assert report.parameters['bracket_residual'] <= 1e-6 * scale


def test_quartic_escape_checks_windows_first(quartic):
    with pytest.raises(ValueError):
        verify_quartic_escape(quartic, inner=0.3, outer=0.3)


def test_convexity_along_the_axis(quartic):
    report = convexity_check(quartic, [[5.0, 0.0, 2.0, 0.0], [-6.0, 0.0, -1.0, 0.0]], t_max=1.0, samples=101)
    assert report.starts == 2
    assert report.violations == 0
    assert report.min_second_difference == pytest.approx(0.0, abs=1e-12)


# =============================================================================
# MATRIX
# =============================================================================
def test_matrix_escape_needs_the_extension():
    with pytest.raises(ValueError, match='n = 2'):
        verify_matrix_escape(MatrixSymbol())


def test_matrix_surface_samples_start_on_the_segment():
    extension = MatrixSymbol(n=2)
    samples = matrix_surface_samples(extension, 30, seed=1, segment_points=5)
    assert samples.shape[1] == 4
    segment = samples[np.isclose(samples[:, 1], 0.0) & np.isclose(samples[:, 3], 0.0)]
    assert np.all(np.abs(segment[:, 0]) <= 1.0)
    np.testing.assert_array_equal(samples, matrix_surface_samples(extension, 30, seed=1, segment_points=5))


def test_matrix_escape_accounts_for_every_sample():
    extension = MatrixSymbol(n=2)
    samples = matrix_surface_samples(extension, 30, seed=1, segment_points=5)
    report = verify_matrix_escape(extension, samples=samples, workers=1)
    assert report.kind == 'matrix'
    assert len(report.values) + report.excluded == len(samples)
    assert report.threshold < 0.0


# =============================================================================
# MANIFOLD CHARTS
# =============================================================================
def test_chart_inputs_are_validated(double_bump):
    with pytest.raises(ValueError):
        AxisPatch(half_width=0.0)
    record = [r for r in find_fixed_points(double_bump) if r.hyperbolic][0]
    with pytest.raises(ValueError):
        ChartRequest(double_bump, record, sign='sideways')


def test_outgoing_chart_stays_on_the_shell(double_bump):
    records = sorted([r for r in find_fixed_points(double_bump) if r.hyperbolic], key=lambda r: r.z[0])
    patch = AxisPatch(axis=0, level=0.0, center=0.0, half_width=0.25)
    chart = generating_function(ChartRequest(double_bump, records[0], OUTGOING, ring_count=48), patch)
    assert chart.launches == 48
    assert chart.shell_residual < 1e-6
    assert np.all(np.isfinite(chart.phi))
