"""
Fourth-Order Symbols
====================
The 1-D quartic symbol

    q(x, xi) = (xi^2 - k(x))(xi^2 - 4 k(x)) + 8 f(x) xi^3 - (3/2) x (1/4 + x) f(x) xi

with f = 1 and k = 0 near the origin and f = 0, k = 1 for |x| >= 3, and its
2-D extension

    p = (xi^2 - 1)(xi^2 - 4) + eta^4 + eta^2 + r(x, xi) chi(y) + lambda (exp(-y^2) - 1)

with r = q - (xi^2 - 1)(xi^2 - 4). Near y = 0 the extension reduces to
q + eta^4 + eta^2 and has the hyperbolic fixed points (-1/4, 0, 0, 0) and
(0, 0, 0, 0) joined by the segment ]-1/4, 0[ x {0}.
"""

from typing import List, Optional

import numpy as np

from symbols.base import PhasePoint, SymbolModel
from symbols.bumps import SmoothBump


def quartic_xi_lambda(lam: float) -> float:
    """
    Far-field root of (xi^2 - 1)(xi^2 - 4) = lambda.

    Args:
        lam: lambda > -5/4

    Returns:
        xi_lambda = sqrt((5 + sqrt(9 + 4 lambda)) / 2)
    """
    if lam <= -1.25:
        raise ValueError(f"xi_lambda is real only for lambda > -5/4, got {lam}")
    return float(np.sqrt((5.0 + np.sqrt(9.0 + 4.0 * lam)) / 2.0))


def base_quartic(xi):
    """(xi^2 - 1)(xi^2 - 4) and its first two derivatives."""
    return (xi ** 4 - 5.0 * xi ** 2 + 4.0, 4.0 * xi ** 3 - 10.0 * xi, 12.0 * xi ** 2 - 10.0)


class Quartic1D(SymbolModel):
    """The 1-D symbol q(x, xi) with bump profiles f and 1 - k."""

    name = 'quartic_1d'

    def __init__(self, f_amplitude: float = 1.0, f_outer: float = 1.0,
                 k_depth: float = 1.0, k_outer: float = 3.0, plateau: float = 0.5):
        super().__init__(1)
        if f_outer > 1.0 or k_outer > 3.0:
            raise ValueError(f"profile edges must satisfy f_outer <= 1 and k_outer <= 3, got {f_outer}, {k_outer}")
        self.f_amplitude = float(f_amplitude)
        self.k_depth = float(k_depth)
        self.f_profile = SmoothBump(plateau, f_outer)
        self.k_profile = SmoothBump(plateau, k_outer)

    support_radius = 3.0

    def _profiles(self, x: float):
        """(f, f', f''), (k, k', k''), (g, g', g'') at x with g = (3/2)(x/4 + x^2) f."""
        fb = self.f_profile
        kb = self.k_profile
        f = self.f_amplitude * fb.value(x)
        f1 = self.f_amplitude * fb.derivative(x)
        f2 = self.f_amplitude * fb.second_derivative(x)
        k = 1.0 - self.k_depth * kb.value(x)
        k1 = -self.k_depth * kb.derivative(x)
        k2 = -self.k_depth * kb.second_derivative(x)
        a, a1 = 0.25 * x + x ** 2, 0.25 + 2.0 * x
        g = 1.5 * a * f
        g1 = 1.5 * (a1 * f + a * f1)
        g2 = 1.5 * (2.0 * f + 2.0 * a1 * f1 + a * f2)
        return (f, f1, f2), (k, k1, k2), (g, g1, g2)

    def derivatives(self, x: float, xi: float):
        """q, q_x, q_xi, q_xx, q_xxi, q_xixi at (x, xi)."""
        (f, f1, f2), (k, k1, k2), (g, g1, g2) = self._profiles(x)
        q = xi ** 4 - 5.0 * k * xi ** 2 + 4.0 * k ** 2 + 8.0 * f * xi ** 3 - g * xi
        qx = -5.0 * k1 * xi ** 2 + 8.0 * k * k1 + 8.0 * f1 * xi ** 3 - g1 * xi
        qxi = 4.0 * xi ** 3 - 10.0 * k * xi + 24.0 * f * xi ** 2 - g
        qxx = -5.0 * k2 * xi ** 2 + 8.0 * (k1 ** 2 + k * k2) + 8.0 * f2 * xi ** 3 - g2 * xi
        qxxi = -10.0 * k1 * xi + 24.0 * f1 * xi ** 2 - g1
        qxixi = 12.0 * xi ** 2 - 10.0 * k + 48.0 * f * xi
        return q, qx, qxi, qxx, qxxi, qxixi

    def value(self, z: np.ndarray) -> float:
        return float(self.derivatives(z[0], z[1])[0])

    def gradient(self, z: np.ndarray) -> np.ndarray:
        _, qx, qxi, _, _, _ = self.derivatives(z[0], z[1])
        return np.array([qx, qxi])

    def hessian(self, z: np.ndarray) -> np.ndarray:
        _, _, _, qxx, qxxi, qxixi = self.derivatives(z[0], z[1])
        return np.array([[qxx, qxxi], [qxxi, qxixi]])

    def fixed_point_seeds(self) -> List[np.ndarray]:
        return [np.array([-0.25, 0.0]), np.array([0.0, 0.0])]

    def parameters(self) -> dict:
        return {
            'name': self.name, 'n': 1, 'f_amplitude': self.f_amplitude, 'f_outer': self.f_profile.outer_radius,
            'k_depth': self.k_depth, 'k_outer': self.k_profile.outer_radius,
        }


class Quartic2D(SymbolModel):
    """
    2-D extension of Quartic1D; z = (x, y, xi, eta).

    `modification` is an optional real perturbation W(x, y) with value,
    gradient and hessian methods, added to the symbol.
    """

    name = 'quartic'

    def __init__(self, lam: float = 18.0, base: Optional[Quartic1D] = None,
                 chi: Optional[SmoothBump] = None, modification=None):
        super().__init__(2)
        if not lam > 1.0:
            raise ValueError(f"lambda must exceed 1, got {lam}")
        self.lam = float(lam)
        self.base = base or Quartic1D()
        self.chi = chi or SmoothBump(0.5, 1.0)
        self.modification = modification

    support_radius = 3.0

    @property
    def xi_lambda(self) -> float:
        return quartic_xi_lambda(self.lam)

    def _pieces(self, z):
        x, y, xi, eta = z
        q, qx, qxi, qxx, qxxi, qxixi = self.base.derivatives(x, xi)
        b0, b1, b2 = base_quartic(xi)
        r, rx, rxi, rxx, rxxi, rxixi = q - b0, qx, qxi - b1, qxx, qxxi, qxixi - b2
        chi, chi1, chi2 = self.chi.value(y), self.chi.derivative(y), self.chi.second_derivative(y)
        e = np.exp(-y ** 2)
        return (x, y, xi, eta), (b0, b1, b2), (r, rx, rxi, rxx, rxxi, rxixi), (chi, chi1, chi2), e

    def value(self, z: np.ndarray) -> float:
        (x, y, xi, eta), (b0, _, _), (r, *_), (chi, _, _), e = self._pieces(z)
        p = b0 + eta ** 4 + eta ** 2 + r * chi + self.lam * (e - 1.0)
        if self.modification is not None:
            p += self.modification.value(np.array([x, y]))
        return float(p)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        (x, y, xi, eta), (_, b1, _), (r, rx, rxi, _, _, _), (chi, chi1, _), e = self._pieces(z)
        grad = np.array([
            rx * chi,
            r * chi1 - 2.0 * self.lam * y * e,
            b1 + rxi * chi,
            4.0 * eta ** 3 + 2.0 * eta,
        ])
        if self.modification is not None:
            grad[:2] += self.modification.gradient(np.array([x, y]))
        return grad

    def hessian(self, z: np.ndarray) -> np.ndarray:
        (x, y, xi, eta), (_, _, b2), (r, rx, rxi, rxx, rxxi, rxixi), (chi, chi1, chi2), e = self._pieces(z)
        h = np.zeros((4, 4))
        h[0, 0] = rxx * chi
        h[0, 1] = rx * chi1
        h[0, 2] = rxxi * chi
        h[1, 1] = r * chi2 + self.lam * (4.0 * y ** 2 - 2.0) * e
        h[1, 2] = rxi * chi1
        h[2, 2] = b2 + rxixi * chi
        h[3, 3] = 12.0 * eta ** 2 + 2.0
        if self.modification is not None:
            h[:2, :2] += self.modification.hessian(np.array([x, y]))
        return np.triu(h) + np.triu(h, 1).T

    def far_field(self, z: np.ndarray) -> float:
        """(xi^2 - 1)(xi^2 - 4) + eta^4 + eta^2 + lambda (exp(-y^2) - 1)."""
        _, y, xi, eta = z
        return float(base_quartic(xi)[0] + eta ** 4 + eta ** 2 + self.lam * (np.exp(-y ** 2) - 1.0))

    def fixed_point_seeds(self) -> List[np.ndarray]:
        return [np.array([-0.25, 0.0, 0.0, 0.0]), np.array([0.0, 0.0, 0.0, 0.0])]

    def reference_fixed_points(self) -> List[PhasePoint]:
        return [PhasePoint((-0.25, 0.0), (0.0, 0.0)), PhasePoint((0.0, 0.0), (0.0, 0.0))]

    def segment_heteroclinic(self, count: int = 401) -> np.ndarray:
        """Points of ]-1/4, 0[ x {0} in {y = eta = 0}."""
        x = np.linspace(-0.25, 0.0, count)
        zeros = np.zeros_like(x)
        return np.column_stack([x, zeros, zeros, zeros])

    def parameters(self) -> dict:
        return {
            'name': self.name, 'n': 2, 'lambda': self.lam, 'base': self.base.parameters(),
            'chi': (self.chi.inner_radius, self.chi.outer_radius),
            'modification': None if self.modification is None else self.modification.parameters(),
        }
