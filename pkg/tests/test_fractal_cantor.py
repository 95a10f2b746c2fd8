import numpy as np
import pytest

from fractal import box_dimension, cantor_build, point_set, zero_set_function


def test_cantor_ratio_and_interval_count():
    K = cantor_build(0.5, 6)
    assert K.ratio == pytest.approx(0.25)
    assert len(K.intervals) == 2 ** 6
    assert np.all(np.diff(K.lefts) > 0)


def test_translated_cantor_contains_zero():
    K = cantor_build(0.6, 5)
    assert K.distance(0.0) == 0.0
    lo, hi = K.hull
    assert -0.5 <= lo < hi <= 0.5


def test_untranslated_cantor_is_symmetric_in_quarter_interval():
    K = cantor_build(0.5, 4, translate=False)
    assert K.is_symmetric
    assert K.hull == pytest.approx((-0.25, 0.25))


def test_distance_in_a_gap():
    K = cantor_build(0.5, 1, translate=False)
    # level one keeps [-1/4, -1/8] and [1/8, 1/4]
    assert K.distance(0.0) == pytest.approx(0.125)
    assert K.distance(-0.2) == 0.0
    assert K.distance(0.5) == pytest.approx(0.25)


def test_point_set_is_the_origin():
    K = point_set(3)
    np.testing.assert_array_equal(K.intervals, [[0.0, 0.0]])
    assert K.distance(0.3) == pytest.approx(0.3)
    assert K.target_dim == 0.0 and K.depth == 3
    with pytest.raises(ValueError):
        point_set(0)


@pytest.mark.parametrize('dim, depth', [(1.0, 3), (0.0, 3), (-0.1, 3), (0.5, 0)])
def test_cantor_rejects_bad_parameters(dim, depth):
    with pytest.raises(ValueError):
        cantor_build(dim, depth)


def test_cantor_endpoints_have_the_target_dimension():
    K = cantor_build(0.5, 10)
    report = box_dimension(K.realized_points)
    assert report.fitted_dim == pytest.approx(0.5, abs=0.1)


@pytest.fixture(scope='module')
def zero_set():
    return zero_set_function(cantor_build(0.5, 3), res=1.0 / 256)


def test_g_vanishes_on_K_and_is_positive_in_gaps(zero_set):
    K = zero_set.K
    np.testing.assert_array_equal(zero_set.g(K.realized_points), 0.0)
    gaps = 0.5 * (K.rights[:-1] + K.lefts[1:])
    assert np.all(zero_set.g(gaps) > 0)
    assert zero_set.g(2.0) == 0.0


def test_G_is_zero_at_origin_and_grows_with_distance(zero_set):
    assert zero_set.G(0.0) == pytest.approx(0.0, abs=1e-15)
    assert zero_set.G(1.2) > zero_set.G(0.8) > 0.0
    assert zero_set.G(-1.2) > zero_set.G(-0.8) > 0.0


def test_G_derivatives_match_differences(zero_set):
    t, h = 0.9, 1e-4
    assert zero_set.G_prime(t) == pytest.approx((zero_set.G(t + h) - zero_set.G(t - h)) / (2 * h), rel=1e-5)
    assert zero_set.G_second(t) == pytest.approx(
        (zero_set.G_prime(t + h) - zero_set.G_prime(t - h)) / (2 * h), rel=1e-4)


def test_hausdorff_distance_of_K_to_itself(zero_set):
    K = zero_set.K
    assert zero_set.hausdorff_to_K(K.realized_points) == pytest.approx(0.0, abs=1e-15)
    assert zero_set.hausdorff_to_K(np.array([]), 1.0) == np.inf
