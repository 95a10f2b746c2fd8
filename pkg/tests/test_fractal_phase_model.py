import numpy as np
import pytest

from fractal import (
    PhaseModel,
    cantor_build,
    derivative_scaling,
    embed_phase_model,
    heteroclinic_extract,
    phase_build,
    pullback_potential,
    sign_structure_check,
    zero_set_function,
)
from symbols import DoubleBump


@pytest.fixture(scope='module')
def modified_model():
    g = zero_set_function(cantor_build(0.5, 4), res=1.0 / 512)
    return PhaseModel(E0=1.0, nu=0.05, g=g)


def _central(f, x, h):
    out = []
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        out.append((f(x + e) - f(x - e)) / (2 * h))
    return np.array(out)


@pytest.mark.parametrize('nu', [0.01, 0.5])
def test_nu_outside_range_is_rejected(nu):
    with pytest.raises(ValueError):
        PhaseModel(nu=nu)


def test_zero_alpha_is_rejected():
    with pytest.raises(ValueError):
        PhaseModel(alpha=0.0)


@pytest.mark.parametrize('point', [(0.1, 0.01), (0.2, -0.04), (0.05, 0.03)])
def test_phase_gradient_and_hessian(point, modified_model):
    phi = phase_build(modified_model)
    x = np.array(point)
    h = 1e-6
    np.testing.assert_allclose(phi.gradient(x), _central(phi.value, x, h), rtol=1e-4, atol=1e-9)
    hessian_fd = np.column_stack([_central(lambda y, k=k: phi.gradient(y)[k], x, h) for k in range(2)])
    np.testing.assert_allclose(phi.hessian(x), hessian_fd, rtol=1e-3, atol=1e-7)


def test_phase_matches_incoming_phase_past_the_step():
    model = PhaseModel(nu=0.05)
    phi = phase_build(model)
    x2 = 0.02
    assert phi.value(np.array([0.5, x2])) == pytest.approx(model.phi_minus(x2))
    assert phi.value(np.array([-0.1, x2])) == 0.0


def test_pullback_potential_support(modified_model):
    W = pullback_potential(modified_model)
    r = modified_model.root_nu
    assert W.value(np.array([-0.05, 0.01])) == 0.0
    assert W.value(np.array([r + 0.05, 0.01])) == 0.0
    assert W.value(np.array([0.5 * r, 0.06])) == 0.0
    assert W.value(np.array([0.5 * r, 0.02])) != 0.0


def test_pullback_gradient_matches_differences():
    W = pullback_potential(PhaseModel(nu=0.05))
    x = np.array([0.1, 0.015])
    np.testing.assert_allclose(W.gradient(x), _central(W.value, x, 1e-6), rtol=1e-4, atol=1e-9)


def test_unmodified_fiber_is_the_plateau():
    model = PhaseModel(nu=0.05)
    res = model.nu / 256
    fiber = heteroclinic_extract(model, res=res)
    assert fiber.min() == pytest.approx(-0.5 * model.nu, abs=res)
    assert fiber.max() == pytest.approx(0.5 * model.nu, abs=res)


def test_modified_fiber_follows_scaled_K(modified_model):
    nu = modified_model.nu
    res = nu * modified_model.g.res / 2
    fiber = heteroclinic_extract(modified_model, res=res)
    assert fiber.size > 0
    assert modified_model.g.hausdorff_to_K(fiber, nu) <= nu * modified_model.g.res


def test_alpha_sign_does_not_move_the_fiber(modified_model):
    res = modified_model.nu * modified_model.g.res / 2
    plus = heteroclinic_extract(modified_model, res=res)
    minus = heteroclinic_extract(modified_model.with_alpha(-1.0), res=res)
    np.testing.assert_array_equal(plus, minus)


def test_x1_slice_inside_the_step_is_rejected():
    model = PhaseModel(nu=0.05)
    with pytest.raises(ValueError):
        heteroclinic_extract(model, x1_slice=0.5 * model.root_nu)


def test_sign_structure(modified_model):
    report = sign_structure_check(modified_model, samples=401)
    assert report.passed


def test_derivative_scaling_exponents():
    report = derivative_scaling(PhaseModel(nu=0.05), ladder=(0.1, 0.05, 0.025), grid=41)
    assert report.passed
    np.testing.assert_allclose(report.exponents, report.expected, atol=report.tolerance)


def test_embedding_feeds_the_double_bump():
    base = DoubleBump()
    embedded = embed_phase_model(base, PhaseModel(nu=0.05))
    assert embedded.w_potential is not None
    # the pullback vanishes outside its support box
    z = np.array([1.0, 1.0, 0.3, 0.2])
    assert embedded.value(z) == pytest.approx(base.value(z))
    with pytest.raises(ValueError):
        embed_phase_model(object(), PhaseModel(nu=0.05))

