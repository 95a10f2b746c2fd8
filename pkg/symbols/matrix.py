"""
Matrix-Valued Symbols
=====================
The 2 x 2 symbol

    q(x, xi) = [[xi^2 + v1(x) - delta chi(x) xi,  eps w(x)],
                [eps w(x),                        xi^2 + v2(x)]]

on T*R and its extension to T*R^2

    p = (xi^2 + eta^2) Id + diag(-1 - lambda, -4 - lambda)
        + R(x, xi) chi~(y) + lambda phi(y) psi(x) Id,

R = q - xi^2 Id - diag(-1, -4). v1 and v2 are capped barriers with maxima
0 at x = -1 and x = 1, so the top eigenvalue branch has hyperbolic fixed
points there; the drift term delta chi xi splits the crossing of the two
diagonal branches and the coupling eps w opens an avoided crossing at x_+.

Scalar reductions:
- EigenBranch: a sorted eigenvalue, gradient by Hellmann-Feynman
- DeterminantReduction: det p, gradient by Jacobi's formula
"""

from typing import List, Optional

import numpy as np
from scipy.optimize import brentq

from symbols.base import PhasePoint, SymbolModel
from symbols.bumps import SmoothBump
from symbols.quadratic import RadialBarrier


def _barrier_1d(height: float, radius: float, center: float) -> RadialBarrier:
    return RadialBarrier(height, radius, (center,))


def crossing_point() -> float:
    """x_0 in (0, 1) where v1 = v2 = -1."""
    return float(1.0 - 2.0 * np.sqrt(1.0 - 0.75 ** 0.2))


def drift_roots(delta: float):
    """xi_+- = (delta +- sqrt(4 + delta^2)) / 2, roots of xi^2 - delta xi - 1."""
    root = np.sqrt(4.0 + delta ** 2)
    return float((delta + root) / 2.0), float((delta - root) / 2.0)


class MatrixSymbol:
    """
    2 x 2 symmetric symbol for n = 1 (the base symbol q) or n = 2 (the extension p).

    Evaluation returns the matrix; use EigenBranch or DeterminantReduction
    for anything needing a scalar Hamiltonian.
    """

    name = 'matrix'
    is_matrix = True
    absorption = None

    def __init__(self, n: int = 1, delta: float = 0.2, eps: float = 0.1, lam: float = 200.0,
                 chi_inner: float = 0.1, chi_outer: float = 0.2,
                 w_inner: float = 0.03, w_outer: float = 0.08):
        if n not in (1, 2):
            raise ValueError(f"matrix symbols are defined for n in {{1, 2}}, got {n}")
        if delta < 0 or eps < 0:
            raise ValueError(f"delta and eps must be non-negative, got {delta}, {eps}")
        self.n = n
        self.delta = float(delta)
        self.eps = float(eps)
        self.lam = float(lam)
        self.v1 = _barrier_1d(1.0, 0.5, -1.0)
        self.v2 = _barrier_1d(4.0, 2.0, 1.0)
        self.x0 = crossing_point()
        self.chi = SmoothBump(chi_inner, chi_outer, self.x0)
        self.xi_plus, self.xi_minus = drift_roots(self.delta)
        self.x_plus = self._branch_meeting(self.xi_plus, -chi_inner, 0.0)
        self.x_minus = self._branch_meeting(self.xi_minus, 0.0, chi_inner)
        self.w = SmoothBump(w_inner, w_outer, self.x_plus)
        # extension cutoffs
        self.chi_tilde = SmoothBump(0.05, 0.35)
        self.phi_bump = SmoothBump(0.5, 0.9)
        self.psi = SmoothBump(3.5, 5.0)
        self.g_x = SmoothBump(3.1, 3.4)
        self.g_y = SmoothBump(0.4, 0.7)

    support_radius = 5.0

    def _branch_meeting(self, xi_root: float, lo: float, hi: float) -> float:
        """x near x_0 where xi^2 + v2(x) = 0 for xi = xi_root."""
        target = lambda x: xi_root ** 2 + self.V2(x)
        return float(brentq(target, self.x0 + lo, self.x0 + hi, xtol=1e-14))

    # -------------------------------------------------------------------------
    # 1-D pieces
    # -------------------------------------------------------------------------
    def V1(self, x: float) -> float:
        return -1.0 + self.v1.value(np.array([x]))

    def V2(self, x: float) -> float:
        return -4.0 + self.v2.value(np.array([x]))

    def dV1(self, x: float) -> float:
        return float(self.v1.gradient(np.array([x]))[0])

    def dV2(self, x: float) -> float:
        return float(self.v2.gradient(np.array([x]))[0])

    def remainder(self, x: float, xi: float):
        """R(x, xi), dR/dx and dR/dxi."""
        chi, dchi = self.chi.value(x), self.chi.derivative(x)
        w, dw = self.w.value(x), self.w.derivative(x)
        R = np.array([[self.V1(x) + 1.0 - self.delta * chi * xi, self.eps * w],
                      [self.eps * w, self.V2(x) + 4.0]])
        Rx = np.array([[self.dV1(x) - self.delta * dchi * xi, self.eps * dw],
                       [self.eps * dw, self.dV2(x)]])
        Rxi = np.array([[-self.delta * chi, 0.0], [0.0, 0.0]])
        return R, Rx, Rxi

    def phi(self, y: float):
        """phi(y) = (1 - y^2) * bump(y) and its derivative."""
        b, db = self.phi_bump.value(y), self.phi_bump.derivative(y)
        return (1.0 - y ** 2) * b, -2.0 * y * b + (1.0 - y ** 2) * db

    # -------------------------------------------------------------------------
    # Matrix evaluation
    # -------------------------------------------------------------------------
    def value(self, z: np.ndarray) -> np.ndarray:
        return self.matrix_derivatives(z)[0]

    def matrix_derivatives(self, z: np.ndarray):
        """p(z) and the list of partial derivatives dp/dz_i (all 2 x 2)."""
        eye = np.eye(2)
        if self.n == 1:
            x, xi = z
            R, Rx, Rxi = self.remainder(x, xi)
            base = xi ** 2 * eye + np.diag([-1.0, -4.0])
            return base + R, [Rx, 2.0 * xi * eye + Rxi]
        x, y, xi, eta = z
        R, Rx, Rxi = self.remainder(x, xi)
        ct, dct = self.chi_tilde.value(y), self.chi_tilde.derivative(y)
        ph, dph = self.phi(y)
        ps, dps = self.psi.value(x), self.psi.derivative(x)
        lam = self.lam
        P = ((xi ** 2 + eta ** 2) * eye + np.diag([-1.0 - lam, -4.0 - lam])
             + R * ct + lam * ph * ps * eye)
        dPx = Rx * ct + lam * ph * dps * eye
        dPy = R * dct + lam * dph * ps * eye
        dPxi = 2.0 * xi * eye + Rxi * ct
        dPeta = 2.0 * eta * eye
        return P, [dPx, dPy, dPxi, dPeta]

    def determinant(self, z: np.ndarray) -> float:
        return float(np.linalg.det(self.value(z)))

    def determinant_grid(self, X: np.ndarray, XI: np.ndarray) -> np.ndarray:
        """det q on a mesh of the 1-D phase plane (vectorized)."""
        if self.n != 1:
            raise ValueError("determinant_grid is defined for the 1-D symbol")

        def barrier(b: RadialBarrier, x):
            u = 1.0 - (x - b.center[0]) ** 2 / b.R ** 2
            return np.where(u > 0, b.E0 * np.clip(u, 0.0, None) ** b.m, 0.0)

        chi = self.chi.profile(np.abs(X - self.x0))
        w = self.w.profile(np.abs(X - self.x_plus))
        q11 = XI ** 2 - 1.0 + barrier(self.v1, X) - self.delta * chi * XI
        q22 = XI ** 2 - 4.0 + barrier(self.v2, X)
        return q11 * q22 - (self.eps * w) ** 2

    def fixed_point_seeds(self) -> List[np.ndarray]:
        if self.n == 1:
            return [np.array([-1.0, 0.0]), np.array([1.0, 0.0])]
        return [np.array([-1.0, 0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0, 0.0])]

    def reference_fixed_points(self) -> List[PhasePoint]:
        if self.n == 1:
            return [PhasePoint((-1.0,), (0.0,)), PhasePoint((1.0,), (0.0,))]
        return [PhasePoint((-1.0, 0.0), (0.0, 0.0)), PhasePoint((1.0, 0.0), (0.0, 0.0))]

    def parameters(self) -> dict:
        return {
            'name': self.name, 'n': self.n, 'delta': self.delta, 'eps': self.eps, 'lambda': self.lam,
            'x0': self.x0, 'x_plus': self.x_plus, 'x_minus': self.x_minus,
            'xi_plus': self.xi_plus, 'xi_minus': self.xi_minus,
        }


# =============================================================================
# SCALAR REDUCTIONS
# =============================================================================
class EigenBranch(SymbolModel):
    """
    Sorted eigenvalue branch of a matrix symbol (index -1 is the top one).

    The gradient is v^T (dp/dz_i) v for the unit eigenvector v, exact away
    from eigenvalue crossings.
    """

    name = 'eigen_branch'

    def __init__(self, matrix: MatrixSymbol, index: int = -1):
        super().__init__(matrix.n)
        self.matrix = matrix
        self.index = index

    @property
    def support_radius(self) -> float:
        return self.matrix.support_radius

    def value(self, z: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(self.matrix.value(z))[self.index])

    def gradient(self, z: np.ndarray) -> np.ndarray:
        P, dP = self.matrix.matrix_derivatives(z)
        _, vecs = np.linalg.eigh(P)
        v = vecs[:, self.index]
        return np.array([v @ D @ v for D in dP])

    def fixed_point_seeds(self) -> List[np.ndarray]:
        return self.matrix.fixed_point_seeds()

    def reference_fixed_points(self) -> List[PhasePoint]:
        return self.matrix.reference_fixed_points()

    def parameters(self) -> dict:
        return {'name': self.name, 'index': self.index, 'matrix': self.matrix.parameters()}


class DeterminantReduction(SymbolModel):
    """det p as a scalar symbol; its zero set is the characteristic set of p."""

    name = 'determinant'

    def __init__(self, matrix: MatrixSymbol):
        super().__init__(matrix.n)
        self.matrix = matrix

    @property
    def support_radius(self) -> float:
        return self.matrix.support_radius

    def value(self, z: np.ndarray) -> float:
        return self.matrix.determinant(z)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        P, dP = self.matrix.matrix_derivatives(z)
        adj = np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]])
        return np.array([np.trace(adj @ D) for D in dP])

    def parameters(self) -> dict:
        return {'name': self.name, 'matrix': self.matrix.parameters()}


def top_branch(matrix: Optional[MatrixSymbol] = None) -> EigenBranch:
    """Top eigenvalue branch (the default matrix symbol if none is given)."""
    return EigenBranch(matrix or MatrixSymbol())
