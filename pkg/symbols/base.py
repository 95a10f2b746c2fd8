"""
Symbol Abstraction
==================
Phase-space points, the SymbolModel base class and absorption windows.

Coordinates are stacked as z = (x, xi) with x, xi in R^n. Every symbol
evaluates its value, gradient (d_x p, d_xi p) and 2n x 2n Hessian on such
flat arrays; the public operations accept PhasePoint or arrays.

This module handles:
- PhasePoint validation and conversion
- Finite-difference fallbacks for gradients and Hessians
- The Hamiltonian field H_p = (d_xi p, -d_x p)
- Absorption windows that delete trajectories from the trapped set
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from config import settings
from symbols.bumps import SmoothBump
from utils.numerics import central_gradient, central_hessian, field_from_gradient


# =============================================================================
# PHASE POINTS
# =============================================================================
@dataclass(frozen=True)
class PhasePoint:
    """A point (x, xi) of T*R^n with n in {1, 2}."""

    x: Tuple[float, ...]
    xi: Tuple[float, ...]

    def __post_init__(self):
        x = tuple(float(v) for v in np.atleast_1d(self.x))
        xi = tuple(float(v) for v in np.atleast_1d(self.xi))
        if len(x) != len(xi):
            raise ValueError(f"x has dimension {len(x)} but xi has dimension {len(xi)}")
        if len(x) not in (1, 2):
            raise ValueError(f"phase points must have n in {{1, 2}}, got n = {len(x)}")
        if not all(np.isfinite(x + xi)):
            raise ValueError(f"phase point coordinates must be finite, got x={x}, xi={xi}")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'xi', xi)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def as_array(self) -> np.ndarray:
        return np.array(self.x + self.xi)

    @classmethod
    def from_array(cls, z) -> 'PhasePoint':
        z = np.asarray(z, dtype=float).ravel()
        if z.size % 2:
            raise ValueError(f"phase arrays have even length, got {z.size}")
        n = z.size // 2
        return cls(tuple(z[:n]), tuple(z[n:]))

    def distance(self, other: 'PhasePoint') -> float:
        return float(np.linalg.norm(self.as_array - other.as_array))


PointLike = Union[PhasePoint, np.ndarray, tuple, list]


def as_phase_array(rho: PointLike, n: Optional[int] = None) -> np.ndarray:
    """Flat (x, xi) array of a PhasePoint or array, checking the dimension."""
    z = rho.as_array if isinstance(rho, PhasePoint) else np.asarray(rho, dtype=float).ravel()
    if n is not None and z.size != 2 * n:
        raise ValueError(f"symbol has dimension n = {n}, point has {z.size} coordinates")
    if not np.all(np.isfinite(z)):
        raise ValueError("phase point coordinates must be finite")
    return z


# =============================================================================
# ABSORPTION
# =============================================================================
@dataclass(frozen=True)
class AbsorptionSpec:
    """
    Absorbing window.

    mode 'pseudo_window' is a phase-space ball (center has 2n entries);
    mode 'potential_window' is a disc in x-space (center has n entries).
    The absorbing symbol is strength times a bump equal to 1 on the inner
    half of the window.
    """

    mode: str
    center: Tuple[float, ...]
    radius: float
    strength: float = 1.0

    def __post_init__(self):
        if self.mode not in ('pseudo_window', 'potential_window'):
            raise ValueError(f"Unknown absorption mode '{self.mode}'")
        if not self.radius > 0:
            raise ValueError(f"absorption radius must be positive, got {self.radius}")
        if not self.strength > 0:
            raise ValueError(f"absorption strength must be positive, got {self.strength}")
        object.__setattr__(self, 'center', tuple(float(c) for c in self.center))

    def _offset(self, z: np.ndarray) -> np.ndarray:
        if self.mode == 'pseudo_window':
            return z - np.asarray(self.center)
        return z[:len(self.center)] - np.asarray(self.center)

    def signed_distance(self, z: np.ndarray) -> float:
        """Positive outside the window, negative inside."""
        return float(np.linalg.norm(self._offset(z)) - self.radius)

    def contains(self, z: np.ndarray) -> bool:
        return self.signed_distance(z) < 0.0

    def value(self, z: np.ndarray) -> float:
        bump = SmoothBump(0.5 * self.radius, self.radius)
        return self.strength * bump.profile(np.linalg.norm(self._offset(z)))


# =============================================================================
# SYMBOL BASE CLASS
# =============================================================================
class SymbolModel:
    """
    Base class of all scalar symbols p(x, xi).

    Subclasses implement `value` and usually `gradient`/`hessian`; the base
    class falls back to central differences.
    """

    name = 'symbol'
    is_matrix = False

    def __init__(self, n: int, absorption: Optional[AbsorptionSpec] = None):
        if n not in (1, 2):
            raise ValueError(f"symbols are defined for n in {{1, 2}}, got {n}")
        self.n = n
        self.absorption = absorption

    # Radius in x beyond which the symbol has its far-field form
    support_radius = 0.0

    def value(self, z: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, z: np.ndarray) -> np.ndarray:
        return central_gradient(self.value, z, settings.FD_STEP_GRADIENT)

    def hessian(self, z: np.ndarray) -> np.ndarray:
        return central_hessian(self.value, z, settings.FD_STEP_HESSIAN)

    def field(self, z: np.ndarray) -> np.ndarray:
        return field_from_gradient(self.gradient(z))

    def absorbs(self, z: np.ndarray) -> bool:
        return self.absorption is not None and self.absorption.contains(z)

    def parameters(self) -> dict:
        """Plain-value snapshot for reports and manifests."""
        return {'name': self.name, 'n': self.n}

    def __repr__(self):
        params = ', '.join(f"{k}={v!r}" for k, v in self.parameters().items() if k != 'name')
        return f"{type(self).__name__}({params})"


# =============================================================================
# PUBLIC OPERATIONS
# =============================================================================
def eval_symbol(s, rho: PointLike):
    """
    Evaluate a symbol at a phase point.

    Args:
        s: SymbolModel, or a matrix symbol
        rho: PhasePoint or flat (x, xi) array

    Returns:
        p(x, xi) as a float, or the symmetric matrix for matrix symbols
    """
    z = as_phase_array(rho, s.n)
    return s.value(z)


def gradient(s, rho: PointLike) -> np.ndarray:
    """(d_x p, d_xi p) stacked; matrix symbols need a scalar reduction first."""
    if getattr(s, 'is_matrix', False):
        raise ValueError(
            f"{type(s).__name__} is matrix-valued; wrap it in EigenBranch or "
            "DeterminantReduction to get a scalar symbol"
        )
    z = as_phase_array(rho, s.n)
    return s.gradient(z)


def hamiltonian_field(s, rho: PointLike) -> np.ndarray:
    """H_p = (d_xi p, -d_x p) at rho."""
    return field_from_gradient(gradient(s, rho))


def hessian(s, rho: PointLike) -> np.ndarray:
    """Symmetrized 2n x 2n Hessian at rho."""
    if getattr(s, 'is_matrix', False):
        raise ValueError(f"{type(s).__name__} is matrix-valued; use a scalar reduction")
    z = as_phase_array(rho, s.n)
    h = s.hessian(z)
    return 0.5 * (h + h.T)


def fd_gradient(s, rho: PointLike) -> np.ndarray:
    """Finite-difference oracle for `gradient`."""
    z = as_phase_array(rho, s.n)
    return central_gradient(s.value, z, settings.FD_STEP_GRADIENT)


def fd_hessian(s, rho: PointLike) -> np.ndarray:
    """Finite-difference oracle for `hessian`."""
    z = as_phase_array(rho, s.n)
    return central_hessian(s.value, z, settings.FD_STEP_HESSIAN)
