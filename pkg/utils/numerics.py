"""
Numeric Helpers
===============
Small numerical routines shared by several packages:

- Central finite-difference gradients and Hessians
- Symplectic matrix J and Hamiltonian field from a gradient
- Deterministic random generators
"""

from typing import Callable

import numpy as np

from config import settings


def central_gradient(func: Callable[[np.ndarray], float], z: np.ndarray,
                     step: float = settings.FD_STEP_GRADIENT) -> np.ndarray:
    """
    Central-difference gradient of a scalar function.

    Args:
        func: Scalar function of a flat array
        z: Evaluation point
        step: Difference step

    Returns:
        Gradient array with the shape of z
    """
    z = np.asarray(z, dtype=float)
    grad = np.empty_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = step
        grad[i] = (func(z + e) - func(z - e)) / (2.0 * step)
    return grad


def central_hessian(func: Callable[[np.ndarray], float], z: np.ndarray,
                    step: float = settings.FD_STEP_HESSIAN) -> np.ndarray:
    """
    Central-difference Hessian of a scalar function, symmetrized.

    Args:
        func: Scalar function of a flat array
        z: Evaluation point
        step: Difference step

    Returns:
        Symmetric (m, m) array
    """
    z = np.asarray(z, dtype=float)
    m = z.size
    hess = np.empty((m, m))
    f0 = func(z)
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = step
        hess[i, i] = (func(z + ei) - 2.0 * f0 + func(z - ei)) / step ** 2
        for j in range(i + 1, m):
            ej = np.zeros(m)
            ej[j] = step
            hess[i, j] = (func(z + ei + ej) - func(z + ei - ej)
                          - func(z - ei + ej) + func(z - ei - ej)) / (4.0 * step ** 2)
            hess[j, i] = hess[i, j]
    return hess


def symplectic_matrix(n: int) -> np.ndarray:
    """J with H_p = J grad p for coordinates ordered (x, xi)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def field_from_gradient(grad: np.ndarray) -> np.ndarray:
    """(d_xi p, -d_x p) from the stacked gradient (d_x p, d_xi p)."""
    n = grad.size // 2
    return np.concatenate([grad[n:], -grad[:n]])


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent deterministic generator per (seed, stream)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))


def unit_circle(count: int, offset: float = 0.0) -> np.ndarray:
    """`count` evenly spaced unit vectors, the first at angle `offset`."""
    angles = offset + 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(angles), np.sin(angles)])
