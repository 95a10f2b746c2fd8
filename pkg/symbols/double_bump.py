"""
Double Bump Symbol
==================
q(x, xi) = |xi|^2 + V(x + (L, 0)) + V(x - (L, 0))
           + eps (xi_1 - sqrt(E0)) x_2 psi(x) + W(x)

Two radial barriers of height E0 give hyperbolic fixed points
rho_1 = ((-L, 0), 0) and rho_2 = ((L, 0), 0) at energy E0. Without tilt the
x_1-axis carries two heteroclinic trajectories: gamma_1 (xi_1 > 0) from
rho_1 to rho_2 and gamma_2 (xi_1 < 0) back. The magnetic-type tilt leaves
gamma_1 in place and pushes gamma_2 off {x_2 = 0} inside supp psi, where a
potential window can absorb it. W is an optional real perturbation
(for instance the pullback potential of the fractal construction).
"""

from typing import List, Optional

import numpy as np

from symbols.base import AbsorptionSpec, PhasePoint, SymbolModel
from symbols.bumps import SmoothBump
from symbols.quadratic import RadialBarrier


class DoubleBump(SymbolModel):
    """Two radial barriers on the x_1-axis with optional tilt, absorption and W."""

    name = 'double_bump'

    def __init__(self, E0: float = 1.0, barrier_radius: float = 1.0, half_separation: float = 2.0,
                 tilt_eps: float = 0.0, tilt_profile: Optional[SmoothBump] = None,
                 absorption: Optional[AbsorptionSpec] = None, w_potential=None):
        super().__init__(2, absorption)
        if half_separation < barrier_radius:
            raise ValueError(
                f"half_separation {half_separation} < barrier_radius {barrier_radius}: barriers overlap"
            )
        self.E0 = float(E0)
        self.L = float(half_separation)
        self.left = RadialBarrier(E0, barrier_radius, (-self.L, 0.0))
        self.right = RadialBarrier(E0, barrier_radius, (self.L, 0.0))
        self.tilt_eps = float(tilt_eps)
        self.tilt_profile = tilt_profile or SmoothBump(0.25, 0.5, (0.0, 0.0))
        self.w_potential = w_potential

    @property
    def support_radius(self) -> float:
        return self.L + self.left.R

    @property
    def barrier_radius(self) -> float:
        return self.left.R

    @property
    def sqrt_E0(self) -> float:
        return float(np.sqrt(self.E0))

    def with_changes(self, **changes) -> 'DoubleBump':
        """Copy with some constructor arguments replaced."""
        kwargs = dict(E0=self.E0, barrier_radius=self.left.R, half_separation=self.L,
                      tilt_eps=self.tilt_eps, tilt_profile=self.tilt_profile,
                      absorption=self.absorption, w_potential=self.w_potential)
        kwargs.update(changes)
        return DoubleBump(**kwargs)

    # -------------------------------------------------------------------------
    # Pieces
    # -------------------------------------------------------------------------
    def potential(self, x: np.ndarray) -> float:
        value = self.left.value(x) + self.right.value(x)
        if self.w_potential is not None:
            value += self.w_potential.value(x)
        return value

    def _potential_derivatives(self, x):
        grad = self.left.gradient(x) + self.right.gradient(x)
        hess = self.left.hessian(x) + self.right.hessian(x)
        if self.w_potential is not None:
            grad = grad + self.w_potential.gradient(x)
            hess = hess + self.w_potential.hessian(x)
        return grad, hess

    def _tilt_pieces(self, x):
        """x_2 psi, its gradient and Hessian."""
        psi = self.tilt_profile.value(x)
        dpsi = self.tilt_profile.gradient(x)
        d2psi = self.tilt_profile.hessian(x)
        e2 = np.array([0.0, 1.0])
        f = x[1] * psi
        df = x[1] * dpsi + psi * e2
        d2f = x[1] * d2psi + np.outer(e2, dpsi) + np.outer(dpsi, e2)
        return f, df, d2f

    # -------------------------------------------------------------------------
    # Symbol interface
    # -------------------------------------------------------------------------
    def value(self, z: np.ndarray) -> float:
        x, xi = z[:2], z[2:]
        p = float(xi @ xi) + self.potential(x)
        if self.tilt_eps:
            f, _, _ = self._tilt_pieces(x)
            p += self.tilt_eps * (xi[0] - self.sqrt_E0) * f
        return p

    def gradient(self, z: np.ndarray) -> np.ndarray:
        x, xi = z[:2], z[2:]
        dV, _ = self._potential_derivatives(x)
        dx = dV.copy()
        dxi = 2.0 * xi.copy()
        if self.tilt_eps:
            f, df, _ = self._tilt_pieces(x)
            dx += self.tilt_eps * (xi[0] - self.sqrt_E0) * df
            dxi[0] += self.tilt_eps * f
        return np.concatenate([dx, dxi])

    def hessian(self, z: np.ndarray) -> np.ndarray:
        x, xi = z[:2], z[2:]
        _, d2V = self._potential_derivatives(x)
        hxx = d2V.copy()
        hxxi = np.zeros((2, 2))
        if self.tilt_eps:
            _, df, d2f = self._tilt_pieces(x)
            hxx += self.tilt_eps * (xi[0] - self.sqrt_E0) * d2f
            hxxi[:, 0] = self.tilt_eps * df
        return np.block([[hxx, hxxi], [hxxi.T, 2.0 * np.eye(2)]])

    # -------------------------------------------------------------------------
    # Reference geometry
    # -------------------------------------------------------------------------
    def fixed_point_seeds(self) -> List[np.ndarray]:
        return [np.array([-self.L, 0.0, 0.0, 0.0]), np.array([self.L, 0.0, 0.0, 0.0])]

    def reference_fixed_points(self) -> List[PhasePoint]:
        return [PhasePoint((-self.L, 0.0), (0.0, 0.0)), PhasePoint((self.L, 0.0), (0.0, 0.0))]

    def axis_heteroclinic(self, direction: int = 1, count: int = 401) -> np.ndarray:
        """
        Points of gamma_1 (direction=+1) or of the untilted gamma_2 (direction=-1).

        On the axis the energy relation gives xi_1 = +-sqrt(E0 - V(x_1, 0)).
        """
        x1 = np.linspace(-self.L, self.L, count)
        xi1 = np.array([np.sqrt(max(self.E0 - self.left.value(np.array([t, 0.0]))
                                    - self.right.value(np.array([t, 0.0])), 0.0)) for t in x1])
        zeros = np.zeros_like(x1)
        return np.column_stack([x1, zeros, direction * xi1, zeros])

    def parameters(self) -> dict:
        return {
            'name': self.name, 'n': 2, 'E0': self.E0, 'R': self.left.R, 'L': self.L,
            'tilt_eps': self.tilt_eps,
            'absorption': None if self.absorption is None else {
                'mode': self.absorption.mode, 'center': self.absorption.center,
                'radius': self.absorption.radius, 'strength': self.absorption.strength,
            },
            'w_potential': None if self.w_potential is None else self.w_potential.parameters(),
        }
