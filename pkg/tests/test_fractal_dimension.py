import numpy as np
import pytest

from fractal import box_dimension, dimension_tolerance, product_cloud, scale_ladder


def test_segment_has_dimension_one():
    cloud = np.linspace(0.0, 1.0, 20000)
    report = box_dimension(cloud)
    assert report.fitted_dim == pytest.approx(1.0, abs=0.05)
    assert report.ci[0] <= report.fitted_dim <= report.ci[1]


def test_filled_square_has_dimension_two():
    axis = np.linspace(0.0, 1.0, 400)
    a, b = np.meshgrid(axis, axis)
    cloud = np.column_stack([a.ravel(), b.ravel()])
    report = box_dimension(cloud, scale_ladder(cloud, count=8))
    assert report.fitted_dim == pytest.approx(2.0, abs=0.15)
    assert report.ambient == 2


def test_single_point_has_dimension_zero():
    report = box_dimension(np.array([[0.3, 0.4], [0.3, 0.4]]))
    assert report.fitted_dim == 0.0
    assert report.ci == (0.0, 0.0)


def test_counts_never_decrease_down_the_ladder(rng):
    cloud = rng.uniform(size=(5000, 2))
    report = box_dimension(cloud)
    assert np.all(np.diff(report.counts) >= 0)
    assert report.fit_mask.sum() == len(report.scales) - 4


def test_too_few_scales_raises():
    with pytest.raises(ValueError):
        box_dimension(np.linspace(0.0, 1.0, 100), scales=[0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625])


def test_scale_ladder_with_a_finest_scale():
    cloud = np.array([[0.0], [2.0]])
    ladder = scale_ladder(cloud, count=5, finest=0.01)
    assert ladder[0] == pytest.approx(1.0)
    assert ladder[-1] == pytest.approx(0.01)
    with pytest.raises(ValueError):
        scale_ladder(cloud, count=5, finest=2.0)


def test_product_cloud_layout():
    fiber = np.array([-0.5, 0.0, 0.5])
    cloud = product_cloud(fiber, (1.0, 2.0), 4)
    assert cloud.shape == (12, 2)
    np.testing.assert_allclose(np.unique(cloud[:, 0]), np.linspace(1.0, 2.0, 4))
    np.testing.assert_allclose(np.unique(cloud[:, 1]), fiber)
    with pytest.raises(ValueError):
        product_cloud(fiber, (1.0, 2.0), 1)


def test_sheet_over_a_segment_is_two_dimensional():
    fiber = np.linspace(-0.5, 0.5, 300)
    cloud = product_cloud(fiber, (0.0, 1.0), 300)
    report = box_dimension(cloud, scale_ladder(cloud, count=8))
    assert report.fitted_dim == pytest.approx(2.0, abs=0.15)


def test_far_face_points_share_the_last_box():
    cloud = np.linspace(0.0, 1.0, 1025)
    report = box_dimension(cloud)
    np.testing.assert_array_equal(report.counts[:6], [2, 4, 8, 16, 32, 64])


def test_snapped_ladder_tiles_the_bounding_box():
    cloud = np.array([[0.0, 0.0], [3.0, 1.0]])
    ladder = scale_ladder(cloud, count=10, finest=0.05, snap=True)
    divisors = 3.0 / ladder
    np.testing.assert_allclose(divisors, np.round(divisors), rtol=1e-12)
    assert np.all(np.diff(ladder) < 0)


def test_filled_sheet_on_a_snapped_ladder_is_exactly_two():
    fiber = np.linspace(-0.5, 0.5, 257)
    cloud = product_cloud(fiber, (0.0, 1.0), 257)
    ladder = scale_ladder(cloud, count=12, finest=4.0 / 256, snap=True)
    report = box_dimension(cloud, ladder)
    np.testing.assert_array_equal(report.counts, np.round(1.0 / ladder) ** 2)
    assert report.fitted_dim == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("target, tol", [(2.0, 0.1), (1.8, 0.15), (1.5, 0.15), (1.2, 0.15)])
def test_dimension_tolerance(target, tol):
    assert dimension_tolerance(target) == tol
