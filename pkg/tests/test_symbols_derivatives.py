import numpy as np
import pytest

from symbols import (
    AbsorptionSpec,
    DoubleBump,
    MatrixSymbol,
    PhasePoint,
    QuadraticModel,
    RadialBarrier,
    SmoothBump,
    SmoothStep,
    eval_symbol,
    fd_gradient,
    fd_hessian,
    gradient,
    hamiltonian_field,
    hessian,
    quartic_xi_lambda,
    radial_barrier_build,
    trace_energy_surface,
)
from symbols.quartic import base_quartic


def test_smooth_step_edges_and_midpoint():
    step = SmoothStep(0.0, 1.0)
    assert step(-0.5) == 0.0
    assert step(1.5) == 1.0
    assert step(0.5) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize('s', [0.1, 0.3, 0.55, 0.8])
def test_smooth_step_derivatives_match_differences(s):
    step = SmoothStep(0.0, 1.0)
    h = 1e-5
    assert step.derivative(s) == pytest.approx((step(s + h) - step(s - h)) / (2 * h), rel=1e-6)
    assert step.second_derivative(s) == pytest.approx(
        (step.derivative(s + h) - step.derivative(s - h)) / (2 * h), rel=1e-5)
    assert step.third_derivative(s) == pytest.approx(
        (step.second_derivative(s + h) - step.second_derivative(s - h)) / (2 * h), rel=1e-5)


def test_smooth_step_rejects_reversed_edges():
    with pytest.raises(ValueError):
        SmoothStep(1.0, 0.0)


def test_smooth_bump_plateau_and_support():
    bump = SmoothBump(0.5, 1.0, (0.0, 0.0))
    assert bump.value(np.array([0.3, 0.0])) == 1.0
    assert bump.value(np.array([0.0, 1.2])) == 0.0
    assert 0.0 < bump.value(np.array([0.75, 0.0])) < 1.0


def test_radial_barrier_top_and_validation():
    barrier = RadialBarrier(1.0, 1.0, (0.0, 0.0))
    assert barrier.value(np.zeros(2)) == pytest.approx(1.0)
    assert barrier.value(np.array([1.5, 0.0])) == 0.0
    with pytest.raises(ValueError):
        RadialBarrier(0.0, 1.0)


def test_double_bump_rejects_overlap():
    with pytest.raises(ValueError):
        DoubleBump(barrier_radius=1.0, half_separation=0.5)


@pytest.mark.parametrize('symbol_name', ['double_bump', 'tilted_bump', 'quartic'])
def test_gradient_and_hessian_match_finite_differences(symbol_name, request, rng):
    s = request.getfixturevalue(symbol_name)
    for _ in range(5):
        z = rng.uniform(-0.9, 0.9, size=2 * s.n)
        if symbol_name != 'quartic':
            z[0] = rng.uniform(-2.8, 2.8)
        np.testing.assert_allclose(s.gradient(z), fd_gradient(s, z), atol=1e-6)
        np.testing.assert_allclose(s.hessian(z), fd_hessian(s, z), atol=1e-4)


def test_quartic_far_field_root():
    assert quartic_xi_lambda(18.0) == pytest.approx(np.sqrt(7.0))
    value, _, _ = base_quartic(quartic_xi_lambda(18.0))
    assert value == pytest.approx(18.0)
    with pytest.raises(ValueError):
        quartic_xi_lambda(-2.0)


def test_absorption_window_contains_and_modes():
    window = AbsorptionSpec('pseudo_window', (0.0, 0.0, -1.0, 0.0), 0.3)
    assert window.contains(np.array([0.0, 0.0, -1.0, 0.1]))
    assert not window.contains(np.array([0.0, 0.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        AbsorptionSpec('sponge', (0.0, 0.0), 0.3)


def test_eval_symbol_checks_the_dimension(double_bump):
    assert eval_symbol(double_bump, PhasePoint((5.0, 0.0), (1.0, 0.0))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        eval_symbol(double_bump, [0.0, 1.0])
    with pytest.raises(ValueError):
        eval_symbol(double_bump, [np.nan, 0.0, 0.0, 0.0])


def test_field_vanishes_at_the_barrier_tops(double_bump):
    for x1 in (-2.0, 2.0):
        np.testing.assert_allclose(hamiltonian_field(double_bump, [x1, 0.0, 0.0, 0.0]), 0.0, atol=1e-14)
    np.testing.assert_allclose(hamiltonian_field(double_bump, [5.0, 0.0, 1.0, 0.0]), [2.0, 0.0, 0.0, 0.0])


def test_matrix_symbol_needs_a_scalar_reduction():
    with pytest.raises(ValueError, match='EigenBranch'):
        gradient(MatrixSymbol(), [0.0, 0.0])
    with pytest.raises(ValueError):
        hessian(MatrixSymbol(), [0.0, 0.0])


def test_normal_form_model_is_its_own_oracle():
    model = QuadraticModel.normal_form([1.0, 2.0])
    z = np.array([0.3, -0.2, 0.5, 0.1])
    np.testing.assert_allclose(gradient(model, z), fd_gradient(model, z), atol=1e-8)
    np.testing.assert_allclose(hessian(model, z), np.diag([-1.0, -2.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        QuadraticModel(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_radial_barrier_build_profile():
    barrier = radial_barrier_build(2.0, 0.5)
    assert barrier.value(np.zeros(2)) == pytest.approx(2.0)
    assert barrier.value(np.array([0.0, 0.6])) == 0.0
    assert np.all(np.linalg.eigvalsh(barrier.hessian(np.zeros(2))) < 0.0)
    with pytest.raises(ValueError):
        radial_barrier_build(1.0, -0.5)


def test_traced_level_set_of_a_free_symbol():
    free = QuadraticModel(np.diag([0.0, 2.0]))
    curves = trace_energy_surface(free.value, [0.0, 0.0], (0, 1), (-1.0, 1.0, -2.05, 2.05), level=1.0)
    assert len(curves) == 2
    heights = sorted(float(np.mean(c[:, 1])) for c in curves)
    np.testing.assert_allclose(heights, [-1.0, 1.0], atol=1e-3)
