"""
Quadratic Symbols
=================
Symbols quadratic in the momentum:

- QuadraticForm: p = <a(x) xi, xi> + b(x).xi + c(x) + V(x), a compactly
  supported perturbation of xi^2
- QuadraticModel: constant-coefficient quadratic forms in z = (x, xi),
  exact oracles for linearizations and local escape brackets
- RadialBarrier: the capped radial barrier E0 (1 - |x|^2/R^2)^m
"""

from typing import Optional, Sequence

import numpy as np

from config import settings
from symbols.base import AbsorptionSpec, SymbolModel
from symbols.bumps import SmoothBump


# =============================================================================
# RADIAL BARRIER
# =============================================================================
class RadialBarrier:
    """
    V(x) = E0 (1 - |x - c|^2 / R^2)^m on |x - c| < R, 0 outside.

    m = smoothness_order + 1, so V is C^(m-1) across |x - c| = R. Near the
    center V = E0 - lambda |x - c|^2 + O(|x - c|^4) with lambda = m E0 / R^2.
    """

    def __init__(self, E0: float, support_radius: float, center: Sequence[float] = (0.0, 0.0),
                 smoothness_order: int = settings.SMOOTHNESS_ORDER):
        if not E0 > 0:
            raise ValueError(f"barrier height E0 must be positive, got {E0}")
        if not support_radius > 0:
            raise ValueError(f"barrier support radius must be positive, got {support_radius}")
        self.E0 = float(E0)
        self.R = float(support_radius)
        self.center = np.asarray(center, dtype=float)
        self.m = int(smoothness_order) + 1

    @property
    def curvature(self) -> float:
        """lambda in V = E0 - lambda |x|^2 + ..."""
        return self.m * self.E0 / self.R ** 2

    def _u(self, x: np.ndarray):
        d = np.asarray(x, dtype=float) - self.center
        return d, 1.0 - float(d @ d) / self.R ** 2

    def value(self, x: np.ndarray) -> float:
        _, u = self._u(x)
        return self.E0 * u ** self.m if u > 0 else 0.0

    def gradient(self, x: np.ndarray) -> np.ndarray:
        d, u = self._u(x)
        if u <= 0:
            return np.zeros_like(d)
        return -2.0 * self.E0 * self.m * u ** (self.m - 1) * d / self.R ** 2

    def hessian(self, x: np.ndarray) -> np.ndarray:
        d, u = self._u(x)
        n = d.size
        if u <= 0:
            return np.zeros((n, n))
        E0, m, R2 = self.E0, self.m, self.R ** 2
        return (4.0 * E0 * m * (m - 1) * u ** (m - 2) * np.outer(d, d) / R2 ** 2
                - 2.0 * E0 * m * u ** (m - 1) / R2 * np.eye(n))

    def radial_slope_sign(self, x: np.ndarray) -> float:
        """(x - c).grad V, negative on the interior of the support minus the center."""
        d, _ = self._u(x)
        return float(d @ self.gradient(x))

    def parameters(self) -> dict:
        return {'E0': self.E0, 'R': self.R, 'center': tuple(self.center), 'm': self.m}


def radial_barrier_build(E0: float, support_radius: float,
                         center: Sequence[float] = (0.0, 0.0)) -> RadialBarrier:
    """
    Build the radial barrier of height E0 supported in B(center, support_radius).

    Args:
        E0: Barrier height (> 0)
        support_radius: Support radius R (> 0)
        center: Barrier center in x-space

    Returns:
        RadialBarrier
    """
    return RadialBarrier(E0, support_radius, center)


# =============================================================================
# QUADRATIC FORM
# =============================================================================
class QuadraticForm(SymbolModel):
    """
    p(x, xi) = <(I + beta A) xi, xi> + beta B.xi + beta C + V(x).

    beta is a SmoothBump in x, so p equals xi^2 + V outside the support of
    beta. Uniform ellipticity needs the smallest eigenvalue of A above -1.
    """

    name = 'quadratic_form'

    def __init__(self, n: int = 2, A: Optional[np.ndarray] = None, B: Optional[Sequence[float]] = None,
                 C: float = 0.0, profile: Optional[SmoothBump] = None,
                 potential: Optional[RadialBarrier] = None,
                 absorption: Optional[AbsorptionSpec] = None):
        super().__init__(n, absorption)
        self.A = np.zeros((n, n)) if A is None else np.asarray(A, dtype=float)
        self.B = np.zeros(n) if B is None else np.asarray(B, dtype=float)
        self.C = float(C)
        if self.A.shape != (n, n) or self.B.shape != (n,):
            raise ValueError(f"coefficient shapes do not match n = {n}")
        if not np.allclose(self.A, self.A.T):
            raise ValueError("A must be symmetric")
        if n and np.linalg.eigvalsh(self.A).min() <= -1.0:
            raise ValueError("I + A must stay positive definite (smallest eigenvalue of A > -1)")
        self.profile = profile or SmoothBump(1.0, 2.0, tuple(np.zeros(n)))
        self.potential = potential

    @property
    def support_radius(self) -> float:
        center = np.atleast_1d(np.asarray(self.profile.center, dtype=float))
        radius = float(np.linalg.norm(center)) + self.profile.outer_radius
        if self.potential is not None:
            radius = max(radius, float(np.linalg.norm(self.potential.center)) + self.potential.R)
        return radius

    def _split(self, z):
        return z[:self.n], z[self.n:]

    def _potential(self, x):
        if self.potential is None:
            return 0.0, np.zeros(self.n), np.zeros((self.n, self.n))
        return self.potential.value(x), self.potential.gradient(x), self.potential.hessian(x)

    def value(self, z: np.ndarray) -> float:
        x, xi = self._split(z)
        beta = self.profile.value(x)
        V, _, _ = self._potential(x)
        return float(xi @ xi + beta * (xi @ self.A @ xi + self.B @ xi + self.C) + V)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        x, xi = self._split(z)
        beta = self.profile.value(x)
        dbeta = self.profile.gradient(x)
        _, dV, _ = self._potential(x)
        inner = xi @ self.A @ xi + self.B @ xi + self.C
        dx = dbeta * inner + dV
        dxi = 2.0 * (xi + beta * self.A @ xi) + beta * self.B
        return np.concatenate([dx, dxi])

    def hessian(self, z: np.ndarray) -> np.ndarray:
        x, xi = self._split(z)
        n = self.n
        beta = self.profile.value(x)
        dbeta = self.profile.gradient(x)
        d2beta = self.profile.hessian(x)
        _, _, d2V = self._potential(x)
        inner = xi @ self.A @ xi + self.B @ xi + self.C
        hxx = d2beta * inner + d2V
        hxxi = np.outer(dbeta, 2.0 * self.A @ xi + self.B)
        hxixi = 2.0 * (np.eye(n) + beta * self.A)
        return np.block([[hxx, hxxi], [hxxi.T, hxixi]])

    def parameters(self) -> dict:
        return {
            'name': self.name, 'n': self.n, 'A': self.A.tolist(), 'B': self.B.tolist(), 'C': self.C,
            'potential': None if self.potential is None else self.potential.parameters(),
        }


# =============================================================================
# CONSTANT-COEFFICIENT MODEL
# =============================================================================
class QuadraticModel(SymbolModel):
    """p(z) = z^T M z / 2 + E for a constant symmetric M, z = (x, xi)."""

    name = 'quadratic_model'

    def __init__(self, M: np.ndarray, energy: float = 0.0, center: Optional[Sequence[float]] = None):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ValueError(f"M must be a square matrix of even size, got shape {M.shape}")
        if not np.allclose(M, M.T):
            raise ValueError("M must be symmetric")
        super().__init__(M.shape[0] // 2)
        self.M = M
        self.energy = float(energy)
        self.center = np.zeros(M.shape[0]) if center is None else np.asarray(center, dtype=float)

    @classmethod
    def normal_form(cls, rates: Sequence[float], center: Optional[Sequence[float]] = None) -> 'QuadraticModel':
        """p = sum_k (lambda_k / 2)(xi_k^2 - x_k^2), eigenvalues +-lambda_k."""
        rates = np.asarray(rates, dtype=float)
        M = np.diag(np.concatenate([-rates, rates]))
        return cls(M, center=center)

    def value(self, z: np.ndarray) -> float:
        d = z - self.center
        return float(0.5 * d @ self.M @ d + self.energy)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        return self.M @ (z - self.center)

    def hessian(self, z: np.ndarray) -> np.ndarray:
        return self.M.copy()

    def parameters(self) -> dict:
        return {'name': self.name, 'n': self.n, 'M': self.M.tolist(), 'energy': self.energy}
