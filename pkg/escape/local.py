"""
Local Escape Functions
======================
G_j(x, xi) = (x - x_j).(xi - xi_j) + C_j near a hyperbolic fixed point
rho_j = (x_j, xi_j), and its Poisson bracket with p.
"""

from typing import Sequence

import numpy as np

from dynamics.fixed_points import FixedPointRecord
from symbols.base import PointLike, as_phase_array


def local_escape_eval(j: int, record: FixedPointRecord, C: float, rho: PointLike) -> float:
    """
    Evaluate G_j at rho.

    Args:
        j: Fixed point label (1 or 2), kept for reporting
        record: FixedPointRecord of rho_j
        C: Additive constant C_j
        rho: Phase point

    Returns:
        (x - x_j).(xi - xi_j) + C
    """
    if j not in (1, 2):
        raise ValueError(f"local escape functions are labelled 1 or 2, got {j}")
    base = record.z
    n = base.size // 2
    z = as_phase_array(rho, n)
    return float((z[:n] - base[:n]) @ (z[n:] - base[n:]) + C)


def local_escape_gradient(record: FixedPointRecord, rho: PointLike) -> np.ndarray:
    """grad G_j = (xi - xi_j, x - x_j)."""
    base = record.z
    n = base.size // 2
    z = as_phase_array(rho, n)
    return np.concatenate([z[n:] - base[n:], z[:n] - base[:n]])


def local_escape_bracket(s, record: FixedPointRecord, rho: PointLike) -> float:
    """
    H_p G_j = d_xi p . (xi - xi_j) - d_x p . (x - x_j).

    Args:
        s: Scalar symbol
        record: FixedPointRecord of rho_j
        rho: Phase point

    Returns:
        The bracket at rho
    """
    base = record.z
    n = s.n
    z = as_phase_array(rho, n)
    grad = s.gradient(z)
    return float(grad[n:] @ (z[n:] - base[n:]) - grad[:n] @ (z[:n] - base[:n]))


def normal_form_bracket(rates: Sequence[float], rho: PointLike, center: PointLike = None) -> float:
    """
    sum_k lambda_k ((xi_k - xi_jk)^2 + (x_k - x_jk)^2).

    H_p G_j for the quadratic normal form p = sum_k lambda_k (xi_k^2 - x_k^2) / 2
    ... in the rotated coordinates where it reads sum_k lambda_k x_k xi_k.
    """
    rates = np.asarray(rates, dtype=float)
    n = rates.size
    z = as_phase_array(rho, n)
    if center is not None:
        z = z - as_phase_array(center, n)
    return float(np.sum(rates * (z[n:] ** 2 + z[:n] ** 2)))


def fit_local_constant(s, record: FixedPointRecord, samples: np.ndarray) -> float:
    """Largest c with H_p G_j >= c |rho - rho_j|^2 over the samples."""
    base = record.z
    ratios = []
    for z in np.atleast_2d(samples):
        d2 = float(np.sum((z - base) ** 2))
        if d2 > 0:
            ratios.append(local_escape_bracket(s, record, z) / d2)
    return float(min(ratios)) if ratios else np.nan
