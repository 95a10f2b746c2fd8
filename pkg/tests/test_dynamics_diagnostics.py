import numpy as np
import pytest

from dynamics import (
    degree_diagnostic,
    find_fixed_points,
    gronwall_check,
    integrate,
    place_potential_window,
    time_reversed,
    winding_number,
)
from symbols import QuadraticForm, SmoothBump
from utils.numerics import unit_circle


def test_winding_of_sampled_circles():
    circle = unit_circle(64)
    assert winding_number(circle) == pytest.approx(1.0)
    assert winding_number(circle[::-1]) == pytest.approx(-1.0)
    assert winding_number(np.tile([1.0, 0.0], (10, 1))) == 0.0
    assert winding_number(circle[:1]) == 0.0


def test_time_reversed_trajectory(double_bump):
    trajectory = integrate(double_bump, [3.0, 0.5, -1.0, 0.2], (0.0, 1.0))
    reversed_ = time_reversed(trajectory)
    assert reversed_.times[0] == pytest.approx(-1.0)
    assert reversed_.times[-1] == 0.0
    np.testing.assert_allclose(reversed_.points[0, :2], trajectory.points[-1, :2])
    np.testing.assert_allclose(reversed_.points[0, 2:], -trajectory.points[-1, 2:])


def test_potential_window_misses_the_axis():
    psi = SmoothBump(0.25, 0.5, (0.0, 0.0))
    path = np.array([[-0.3, 0.1, 0.0, 0.0], [0.0, 0.2, 0.0, 0.0], [0.3, 0.1, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0]])
    window = place_potential_window(path, psi, strength=2.0)
    assert window.mode == 'potential_window'
    assert window.center == (0.0, 0.2)
    assert window.radius == pytest.approx(0.1)
    assert window.radius < abs(window.center[1])
    assert window.strength == 2.0


@pytest.mark.parametrize('path', [
    np.array([[-0.2, 0.0, 1.0, 0.0], [0.2, 0.0, 1.0, 0.0]]),
    np.array([[2.0, 0.3, 1.0, 0.0], [3.0, 0.3, 1.0, 0.0]]),
])
def test_potential_window_rejects_unusable_paths(path):
    with pytest.raises(ValueError):
        place_potential_window(path, SmoothBump(0.25, 0.5, (0.0, 0.0)))


def test_gronwall_identical_flows_never_separate(double_bump):
    starts = [[-0.4, 0.0, 0.3, 0.1], [-0.3, 0.05, 0.4, -0.1]]
    report = gronwall_check(double_bump, double_bump, starts, nu=0.05, t_max=1.0, samples=51)
    assert report.kept == 2
    assert report.max_separation == 0.0
    assert report.fitted_c == 0.0
    assert report.violations == 0


def test_gronwall_rejects_bad_scales(double_bump):
    with pytest.raises(ValueError):
        gronwall_check(double_bump, double_bump, [[0.0, 0.0, 1.0, 0.0]], nu=0.0, t_max=1.0)


def test_degree_is_one_at_time_zero(double_bump):
    records = sorted([r for r in find_fixed_points(double_bump) if r.hyperbolic], key=lambda r: r.z[0])
    rho1, rho2 = records
    report = degree_diagnostic(double_bump, rho2, rho1.z[:2], eps=0.05, times=[0.0], launches=64)
    assert report.windings == [1]
    assert not report.obstructed


def test_degree_input_validation(double_bump):
    records = [r for r in find_fixed_points(double_bump) if r.hyperbolic]
    with pytest.raises(ValueError):
        degree_diagnostic(double_bump, records[0], [2.0, 0.0], eps=0.05, times=[1.0, 0.5])
    flat = QuadraticForm(n=1)
    with pytest.raises(ValueError):
        degree_diagnostic(flat, records[0], [2.0, 0.0], eps=0.05, times=[0.0])
