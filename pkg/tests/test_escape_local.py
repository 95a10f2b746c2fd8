import numpy as np
import pytest

from config import settings
from dynamics import find_fixed_points
from escape import (
    GlueCutoffs,
    OuterEscape,
    QuarticWindows,
    check_quartic_windows,
    choose_ball_radius,
    fit_local_constant,
    local_escape_bracket,
    local_escape_eval,
    local_escape_gradient,
    normal_form_bracket,
    nu_ladder,
    quartic_factor_values,
    scalar_margin,
    shell_samples,
)
from escape.verify import split_absorbed
from symbols import AbsorptionSpec, DoubleBump


@pytest.fixture
def fixed_pair(double_bump):
    records = [r for r in find_fixed_points(double_bump) if r.hyperbolic]
    return sorted(records, key=lambda r: r.z[0])


def test_local_escape_value_and_gradient(fixed_pair):
    left = fixed_pair[0]
    rho = left.z + np.array([0.5, 0.0, 2.0, 0.0])
    assert local_escape_eval(1, left, 0.25, rho) == pytest.approx(1.25)
    np.testing.assert_allclose(local_escape_gradient(left, rho), [2.0, 0.0, 0.5, 0.0])


def test_local_escape_rejects_unknown_label(fixed_pair):
    with pytest.raises(ValueError):
        local_escape_eval(3, fixed_pair[0], 0.0, fixed_pair[0].z)


def test_normal_form_bracket_is_a_weighted_square():
    assert normal_form_bracket([1.0, 2.0], [1.0, 0.0, 0.0, 1.0]) == pytest.approx(3.0)
    assert normal_form_bracket([1.0, 2.0], [1.0, 0.0, 0.0, 1.0], center=[1.0, 0.0, 0.0, 1.0]) == 0.0


@pytest.mark.parametrize('offset', [
    [0.05, 0.03, 0.02, -0.01],
    [-0.04, 0.0, 0.0, 0.06],
    [0.0, -0.05, 0.05, 0.0],
])
def test_local_bracket_positive_near_each_fixed_point(double_bump, fixed_pair, offset):
    for record in fixed_pair:
        assert local_escape_bracket(double_bump, record, record.z + np.array(offset)) > 0.0


def test_local_constant_is_positive_on_a_small_ball(double_bump, fixed_pair, rng):
    record = fixed_pair[1]
    samples = record.z + 0.05 * rng.normal(size=(40, 4))
    assert fit_local_constant(double_bump, record, samples) > 0.0


def test_ball_radius_is_a_quarter_of_the_separation(double_bump, fixed_pair):
    assert choose_ball_radius(double_bump, *fixed_pair) == pytest.approx(1.0)


def test_ball_radius_shrinks_for_a_nearby_window(fixed_pair):
    window = AbsorptionSpec('pseudo_window', (0.0, 0.0, -1.0, 0.0), 0.3)
    s = DoubleBump(E0=1.0, barrier_radius=1.0, half_separation=2.0, absorption=window)
    eps = choose_ball_radius(s, *fixed_pair)
    assert 0.0 < eps < 1.0


def test_outer_escape_taper():
    outer = OuterEscape(np.zeros((1, 4)), 0.5, 1.0)
    assert outer.value(np.array([0.1, 0.0, 0.1, 0.0])) == 0.0
    assert outer.value(np.array([3.0, 0.0, 2.0, 0.0])) == pytest.approx(6.0)
    assert outer.declared_radius == pytest.approx(1.0)
    with pytest.raises(ValueError):
        OuterEscape(np.zeros((1, 4)), 1.0, 0.5)


def test_shell_samples_lie_in_the_energy_window(double_bump):
    samples = shell_samples(double_bump, 1.0, 0.1, 30, seed=7)
    assert samples.shape == (30, 4)
    energies = np.array([double_bump.value(z) for z in samples])
    assert np.all(np.abs(energies - 1.0) <= 0.1 + 1e-6)


def test_shell_samples_are_deterministic(double_bump):
    first = shell_samples(double_bump, 1.0, 0.1, 10, seed=3)
    second = shell_samples(double_bump, 1.0, 0.1, 10, seed=3)
    np.testing.assert_array_equal(first, second)


def test_split_absorbed_drops_window_samples():
    window = AbsorptionSpec('pseudo_window', (0.0, 0.0, -1.0, 0.0), 0.3)
    s = DoubleBump(E0=1.0, barrier_radius=1.0, half_separation=2.0, absorption=window)
    samples = np.array([[0.0, 0.0, -1.0, 0.0], [3.0, 0.0, 1.0, 0.0]])
    kept, dropped = split_absorbed(s, samples)
    assert dropped == 1
    np.testing.assert_array_equal(kept, samples[1:])


def test_scalar_margin_flags_non_positive_brackets():
    samples = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 2.0, 0.0, 0.0], [1e-5, 0.0, 0.0, 0.0]])
    values = np.array([0.5, -0.1, 1.0])
    report = scalar_margin(samples, values, np.zeros((1, 4)), floor_tol=1e-8)
    assert report.ratios[0] == pytest.approx(0.5)
    assert report.ratios[1] == pytest.approx(-0.1)
    # the third denominator is below floor_tol
    assert np.isnan(report.ratios[2])
    assert not report.passed
    assert report.failure_mask.tolist() == [False, True, False]
    np.testing.assert_array_equal(report.worst_sample, samples[1])


def test_quartic_factor_values_at_the_window_centres():
    values = quartic_factor_values(18.0)
    assert values['xi_1'] == pytest.approx(-6.0)
    assert values['xi_2'] == pytest.approx(24.0)
    assert values['xi_lambda'] == pytest.approx(126.0)
    assert values['xi_lambda'] == pytest.approx(values['xi_lambda_closed_form'])


@pytest.mark.parametrize('inner, outer', [(0.3, 0.3), (0.1, 0.7), (0.0, 0.2)])
def test_quartic_windows_rejected_before_sampling(inner, outer):
    with pytest.raises(ValueError):
        check_quartic_windows(18.0, inner, outer)


def test_quartic_windows_weights():
    windows = QuarticWindows(18.0, 0.1, 0.3)
    assert windows.value(2.0) == pytest.approx(1.0)
    assert windows.value(-1.0) == pytest.approx(-1.0)
    assert windows.value(np.sqrt(7.0)) == pytest.approx(1.0)
    assert windows.value(1.5) == 0.0


def test_glue_cutoffs_partition_near_the_fixed_points():
    rho1, rho2 = np.array([-2.0, 0.0, 0.0, 0.0]), np.array([2.0, 0.0, 0.0, 0.0])
    cutoffs = GlueCutoffs(rho1, rho2, 1.0)
    assert cutoffs.values(rho1) == (0.0, 1.0, 0.0)
    assert cutoffs.values(rho2) == (0.0, 0.0, 1.0)
    assert cutoffs.values(np.zeros(4)) == (1.0, 0.0, 0.0)
    # chi_1 is still 1 where chi_0 switches on
    edge = rho1 + np.array([0.75, 0.0, 0.0, 0.0])
    assert cutoffs.chi1(edge) == 1.0
    assert cutoffs.chi0(edge) > 0.0


def test_nu_ladder_halves_down_to_the_floor():
    ladder = nu_ladder()
    assert ladder[0] == 1.0
    np.testing.assert_allclose(ladder[1:] / ladder[:-1], 0.5)
    assert ladder[-1] >= settings.NU_MIN
