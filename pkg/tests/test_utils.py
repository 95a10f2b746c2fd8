import math

import numpy as np

from utils import (
    central_gradient,
    central_hessian,
    field_from_gradient,
    make_rng,
    parallel_map,
    symplectic_matrix,
    unit_circle,
)


def test_parallel_map_keeps_input_order():
    assert parallel_map(math.sqrt, [9.0, 1.0, 4.0], workers=1) == [3.0, 1.0, 2.0]
    assert parallel_map(math.sqrt, [], workers=1) == []


def test_parallel_map_matches_serial_with_a_pool():
    items = [float(k) for k in range(40)]
    assert parallel_map(math.sqrt, items, workers=2, chunksize=4) == [math.sqrt(v) for v in items]


def test_streams_are_independent_and_reproducible():
    first = make_rng(5, 1).uniform(size=3)
    np.testing.assert_array_equal(first, make_rng(5, 1).uniform(size=3))
    assert not np.array_equal(first, make_rng(5, 2).uniform(size=3))


def test_central_differences_of_a_cubic():
    func = lambda z: z[0] ** 3 + z[0] * z[1]
    z = np.array([1.0, 2.0])
    np.testing.assert_allclose(central_gradient(func, z), [5.0, 1.0], rtol=1e-6)
    np.testing.assert_allclose(central_hessian(func, z), [[6.0, 1.0], [1.0, 0.0]], atol=1e-4)


def test_symplectic_structure():
    J = symplectic_matrix(2)
    np.testing.assert_array_equal(J @ J, -np.eye(4))
    np.testing.assert_array_equal(field_from_gradient(np.array([1.0, 2.0, 3.0, 4.0])), [3.0, 4.0, -1.0, -2.0])


def test_unit_circle_points():
    circle = unit_circle(8)
    assert circle.shape == (8, 2)
    np.testing.assert_allclose(np.hypot(circle[:, 0], circle[:, 1]), 1.0)
    np.testing.assert_allclose(circle[0], [1.0, 0.0], atol=1e-15)
