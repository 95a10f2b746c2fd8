import numpy as np
import pytest

from dynamics import find_fixed_points
from symbols import (
    DeterminantReduction,
    EigenBranch,
    MatrixSymbol,
    avoided_crossing_gap,
    fd_gradient,
    matrix_energy_surface,
    surface_roots,
    top_branch,
)

POINTS = [np.array([0.7, 0.3]), np.array([-1.2, 0.5]), np.array([2.5, -0.4])]


@pytest.fixture(scope='module')
def matrix():
    return MatrixSymbol()


@pytest.mark.parametrize('kwargs', [{'n': 3}, {'delta': -0.1}, {'eps': -1.0}])
def test_matrix_symbol_validation(kwargs):
    with pytest.raises(ValueError):
        MatrixSymbol(**kwargs)


@pytest.mark.parametrize('z', POINTS)
def test_matrix_is_symmetric(matrix, z):
    P = matrix.value(z)
    np.testing.assert_array_equal(P, P.T)


@pytest.mark.parametrize('z', POINTS)
def test_reduction_gradients_match_differences(matrix, z):
    for s in (EigenBranch(matrix), DeterminantReduction(matrix)):
        np.testing.assert_allclose(s.gradient(z), fd_gradient(s, z), atol=1e-5)


def test_determinant_reduction_value(matrix):
    z = POINTS[0]
    assert DeterminantReduction(matrix).value(z) == pytest.approx(np.linalg.det(matrix.value(z)))


def test_top_branch_fixed_points(matrix):
    records = [r for r in find_fixed_points(top_branch(matrix)) if r.hyperbolic]
    xs = sorted(float(r.z[0]) for r in records)
    assert xs[0] == pytest.approx(-1.0, abs=1e-8)
    assert xs[-1] == pytest.approx(1.0, abs=1e-8)
    for record in records:
        assert record.energy == pytest.approx(0.0, abs=1e-10)


def test_surface_roots_far_from_the_barriers(matrix):
    np.testing.assert_allclose(surface_roots(matrix, 4.5), [-2.0, -1.0, 1.0, 2.0], atol=1e-9)


def test_coupling_opens_the_crossing():
    coupled = avoided_crossing_gap(MatrixSymbol(eps=0.1))
    uncoupled = avoided_crossing_gap(MatrixSymbol(eps=0.0))
    assert coupled > uncoupled


def test_energy_surface_traced(matrix):
    curves = matrix_energy_surface(matrix, (-2.0, 2.0, -3.0, 3.0), resolution=201)
    assert curves
    for curve in curves:
        assert curve.shape[1] == 2
    with pytest.raises(ValueError):
        matrix_energy_surface(matrix, (1.0, 1.0, -3.0, 3.0))
