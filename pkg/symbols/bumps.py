"""
Smooth Cutoffs
==============
Polynomially smoothed steps and bumps used by every symbol and by the
escape-function construction.

The step is the regularized incomplete beta function
S(t) = I_t(k+1, k+1), i.e. the integral of t^k (1-t)^k normalized to one.
It is C^k, equals 0 for t <= 0 and 1 for t >= 1, and its j-th derivative
scales like width^(-j).
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import beta, betainc

from config import settings

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SmoothStep:
    """Monotone C^k step: 0 below `lower`, 1 above `upper`."""

    lower: float = 0.0
    upper: float = 1.0
    smoothness_order: int = settings.SMOOTHNESS_ORDER

    def __post_init__(self):
        if not np.isfinite(self.lower) or not np.isfinite(self.upper):
            raise ValueError(f"SmoothStep edges must be finite, got ({self.lower}, {self.upper})")
        if self.upper <= self.lower:
            raise ValueError(f"SmoothStep needs upper > lower, got ({self.lower}, {self.upper})")
        if self.smoothness_order < 2:
            raise ValueError(f"smoothness_order must be >= 2, got {self.smoothness_order}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def _t(self, s: ArrayLike) -> np.ndarray:
        return np.clip((np.asarray(s, dtype=float) - self.lower) / self.width, 0.0, 1.0)

    def value(self, s: ArrayLike) -> ArrayLike:
        k = self.smoothness_order
        out = betainc(k + 1, k + 1, self._t(s))
        return out if np.ndim(out) else float(out)

    def derivative(self, s: ArrayLike) -> ArrayLike:
        k = self.smoothness_order
        t = self._t(s)
        out = t ** k * (1.0 - t) ** k / beta(k + 1, k + 1) / self.width
        return out if np.ndim(out) else float(out)

    def second_derivative(self, s: ArrayLike) -> ArrayLike:
        k = self.smoothness_order
        t = self._t(s)
        out = (k * t ** (k - 1) * (1.0 - t) ** (k - 1) * (1.0 - 2.0 * t)
               / beta(k + 1, k + 1) / self.width ** 2)
        return out if np.ndim(out) else float(out)

    def third_derivative(self, s: ArrayLike) -> ArrayLike:
        k = self.smoothness_order
        t = self._t(s)
        out = (k * ((k - 1) * t ** (k - 2) * (1.0 - t) ** (k - 2) * (1.0 - 2.0 * t) ** 2
                    - 2.0 * t ** (k - 1) * (1.0 - t) ** (k - 1))
               / beta(k + 1, k + 1) / self.width ** 3)
        return out if np.ndim(out) else float(out)

    def __call__(self, s: ArrayLike) -> ArrayLike:
        return self.value(s)


@dataclass(frozen=True)
class SmoothBump:
    """
    Radial C^k bump: 1 on the closed inner ball, 0 outside the outer ball.

    `center` is a scalar for 1-D bumps or a vector; evaluation accepts a
    scalar (1-D) or a point of the same length as the center.
    """

    inner_radius: float
    outer_radius: float
    center: Union[float, tuple] = 0.0
    smoothness_order: int = settings.SMOOTHNESS_ORDER

    def __post_init__(self):
        if not self.inner_radius > 0:
            raise ValueError(f"inner_radius must be positive, got {self.inner_radius}")
        if not self.outer_radius > self.inner_radius:
            raise ValueError(
                f"outer_radius must exceed inner_radius, got {self.outer_radius} <= {self.inner_radius}"
            )
        if self.smoothness_order < 2:
            raise ValueError(f"smoothness_order must be >= 2, got {self.smoothness_order}")
        if not np.isscalar(self.center):
            object.__setattr__(self, 'center', tuple(float(c) for c in self.center))

    @property
    def step(self) -> SmoothStep:
        return SmoothStep(self.inner_radius, self.outer_radius, self.smoothness_order)

    # -------------------------------------------------------------------------
    # Radial profile b(r)
    # -------------------------------------------------------------------------
    def profile(self, r: ArrayLike) -> ArrayLike:
        return 1.0 - self.step.value(r)

    def profile_derivative(self, r: ArrayLike) -> ArrayLike:
        return -self.step.derivative(r)

    def profile_second_derivative(self, r: ArrayLike) -> ArrayLike:
        return -self.step.second_derivative(r)

    # -------------------------------------------------------------------------
    # Point evaluation
    # -------------------------------------------------------------------------
    def _offset(self, x: ArrayLike) -> np.ndarray:
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if center.size == 1 and x.size > 1:
            center = np.full(x.shape, center[0])
        if x.shape != center.shape:
            raise ValueError(f"bump center has dimension {center.size}, point has {x.size}")
        return x - center

    def value(self, x: ArrayLike) -> float:
        return float(self.profile(np.linalg.norm(self._offset(x))))

    def gradient(self, x: ArrayLike) -> np.ndarray:
        d = self._offset(x)
        r = np.linalg.norm(d)
        if r <= self.inner_radius or r >= self.outer_radius:
            return np.zeros_like(d)
        return self.profile_derivative(r) * d / r

    def hessian(self, x: ArrayLike) -> np.ndarray:
        d = self._offset(x)
        n = d.size
        r = np.linalg.norm(d)
        if r <= self.inner_radius or r >= self.outer_radius:
            return np.zeros((n, n))
        u = d / r
        uu = np.outer(u, u)
        return (self.profile_second_derivative(r) * uu
                + self.profile_derivative(r) / r * (np.eye(n) - uu))

    def derivative(self, x: float) -> float:
        """Scalar derivative of a 1-D bump."""
        return float(self.gradient(x)[0])

    def second_derivative(self, x: float) -> float:
        """Scalar second derivative of a 1-D bump."""
        return float(self.hessian(x)[0, 0])

    def __call__(self, x: ArrayLike) -> float:
        return self.value(x)
