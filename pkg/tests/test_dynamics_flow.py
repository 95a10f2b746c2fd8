import numpy as np
import pytest

from dynamics import (
    ShellGrid,
    Verdict,
    classify,
    distance_to_set,
    find_fixed_points,
    heteroclinic_shoot,
    integrate,
    reversal_defect,
    scattering_deflection,
    shell_points,
)
from dynamics import heteroclinic
from dynamics.heteroclinic import _shot_cost
from symbols import AbsorptionSpec, DoubleBump, QuadraticForm, RadialBarrier


@pytest.fixture
def bump_fixed_points(double_bump):
    records = find_fixed_points(double_bump)
    return sorted([r for r in records if r.hyperbolic], key=lambda r: r.z[0])


def test_double_bump_fixed_points(bump_fixed_points):
    assert len(bump_fixed_points) == 2
    left, right = bump_fixed_points
    np.testing.assert_allclose(left.z, [-2.0, 0.0, 0.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(right.z, [2.0, 0.0, 0.0, 0.0], atol=1e-10)
    for record in bump_fixed_points:
        assert record.energy == pytest.approx(1.0)
        assert record.spectrum_defect() < 1e-8
        # V = E0 - lambda |x|^2 near the top with lambda = 5 E0 / R^2
        np.testing.assert_allclose(np.abs(record.eigenvalues.real), 2.0 * np.sqrt(5.0), rtol=1e-6)


def test_quartic_fixed_points_on_the_segment(quartic):
    records = [r for r in find_fixed_points(quartic) if r.hyperbolic]
    xs = sorted(round(float(r.z[0]), 8) for r in records)
    assert -0.25 in xs
    assert 0.0 in xs


def test_energy_is_conserved(double_bump):
    start = np.array([0.0, 0.5, 0.6, 0.8])
    trajectory = integrate(double_bump, start, (0.0, 10.0))
    assert trajectory.status == 'ok'
    assert trajectory.energy_drift < 1e-8


def test_time_reversal(double_bump):
    start = np.array([0.3, -0.4, 0.8, 0.6])
    assert reversal_defect(double_bump, start, 5.0) < 1e-6


def test_axis_heteroclinic_lies_on_the_shell(double_bump):
    points = double_bump.axis_heteroclinic(+1, count=51)
    energies = [double_bump.value(z) for z in points]
    np.testing.assert_allclose(energies, 1.0, atol=1e-12)


def test_fixed_point_is_trapped_and_free_line_escapes(double_bump, bump_fixed_points):
    trapped = classify(double_bump, bump_fixed_points[0].z, fixed_points=bump_fixed_points, horizon=20.0)
    assert trapped.verdict is Verdict.TRAPPED
    # the x_2-axis misses both barriers
    free = classify(double_bump, np.array([0.0, 3.0, 0.0, 1.0]), horizon=20.0)
    assert free.verdict is Verdict.ESCAPED


def test_shell_points_have_the_requested_energy(double_bump):
    grid = ShellGrid.for_count(200, double_bump.support_radius, directions=8)
    points = shell_points(double_bump, 1.0, grid)
    assert len(points) > 0
    energies = np.array([double_bump.value(z) for z in points])
    np.testing.assert_allclose(energies, 1.0, atol=1e-8)


def test_distance_to_set():
    reference = np.array([[0.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(distance_to_set(np.array([[0.0, 2.0], [0.5, 0.0]]), reference), [2.0, 0.5])
    assert np.isinf(distance_to_set(np.ones((1, 2)), np.zeros((0, 2)))).all()


def test_heteroclinic_shooting_finds_the_axis_orbit(double_bump, bump_fixed_points):
    left, right = bump_fixed_points
    captures = heteroclinic_shoot(double_bump, left, right)
    assert captures
    best = min(captures, key=lambda c: c.closest_distance)
    assert best.closest_distance < 1e-3
    # the forward orbit leaves rho_1 with xi_1 > 0 along x_2 = 0
    assert best.launch[2] > 0
    assert abs(best.launch[1]) < 1e-5


def test_single_barrier_scatters_strongly():
    single = QuadraticForm(n=2, potential=RadialBarrier(1.0, 1.0, (0.0, 0.0)))
    report = scattering_deflection(single, 0.5, np.linspace(-0.5, 0.5, 5), horizon=40.0)
    assert report.max_angle >= report.threshold
    assert report.trapped == 0


@pytest.fixture
def absorbed_bump():
    window = AbsorptionSpec('pseudo_window', (0.0, 0.0, -1.0, 0.0), 0.3)
    return DoubleBump(E0=1.0, barrier_radius=1.0, half_separation=2.0, absorption=window)


def test_window_inside_one_step_is_not_skipped():
    free = QuadraticForm(n=2)
    window = AbsorptionSpec('pseudo_window', (0.0, 0.0, 1.0, 0.0), 0.05)
    events = [('absorbed', window.signed_distance, -1.0, window.radius)]
    trajectory = integrate(free, [-5.0, 0.0, 1.0, 0.0], (0.0, 10.0), events=events)
    assert trajectory.event == 'absorbed'
    assert trajectory.event_time == pytest.approx(2.475, abs=1e-8)
    assert trajectory.times[-1] == trajectory.event_time
    np.testing.assert_allclose(trajectory.final, [-0.05, 0.0, 1.0, 0.0], atol=1e-8)


def test_backward_scan_stops_at_the_window():
    free = QuadraticForm(n=2)
    window = AbsorptionSpec('pseudo_window', (0.0, 0.0, 1.0, 0.0), 0.05)
    events = [('absorbed', window.signed_distance, -1.0, window.radius)]
    trajectory = integrate(free, [5.0, 0.0, 1.0, 0.0], (0.0, -10.0), events=events, dense=False)
    assert trajectory.event == 'absorbed'
    assert trajectory.event_time == pytest.approx(-2.475, abs=1e-8)
    assert trajectory.dense is None


def test_return_orbit_is_absorbed(absorbed_bump):
    result = classify(absorbed_bump, [0.5, 0.0, -1.0, 0.0])
    assert result.verdict == Verdict.ABSORBED


def test_absorbed_return_heteroclinic_is_not_found(absorbed_bump):
    records = sorted([r for r in find_fixed_points(absorbed_bump) if r.hyperbolic], key=lambda r: r.z[0])
    left, right = records
    assert heteroclinic_shoot(absorbed_bump, right, left) == []
    assert heteroclinic_shoot(absorbed_bump, left, right)


def test_absorbed_shots_cost_a_finite_penalty():
    assert _shot_cost((0.2, 1.0, None, False), 5.0) == 0.2
    assert _shot_cost((0.2, 1.0, None, True), 5.0) == 5.0


def test_refinement_next_to_absorbed_shots_sees_finite_costs(double_bump, bump_fixed_points, monkeypatch):
    left, right = bump_fixed_points
    theta0 = min(heteroclinic_shoot(double_bump, left, right), key=lambda c: c.closest_distance).theta
    real_shoot, real_minimize = heteroclinic._shoot, heteroclinic.minimize_scalar
    costs = []

    def one_side_absorbed(*args, **kwargs):
        distance, time, trajectory, _ = real_shoot(*args, **kwargs)
        offset = np.angle(np.exp(1j * (args[4] - theta0)))
        return distance, time, trajectory, bool(1e-9 < offset < 0.5 * np.pi)

    def recording_minimize(fun, **kwargs):
        def recorded(theta):
            costs.append(fun(theta))
            return costs[-1]
        return real_minimize(recorded, **kwargs)

    monkeypatch.setattr(heteroclinic, '_shoot', one_side_absorbed)
    monkeypatch.setattr(heteroclinic, 'minimize_scalar', recording_minimize)
    captures = heteroclinic_shoot(double_bump, left, right)
    assert costs and np.all(np.isfinite(costs))
    assert captures and captures[0].closest_distance < 1e-3
