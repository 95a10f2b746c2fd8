"""
Fixed Points
============
Damped Newton iteration on H_p = 0 and eigen-classification of the
linearization J Hess(p).

This module handles:
- Newton solves from seeds, with one perturbed restart on a singular Jacobian
- De-duplication of converged roots
- Hyperbolicity test and escape rates lambda_{j,k}
- Unstable/stable launch bases for shooting and manifold charts
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from config import settings
from symbols.base import PhasePoint, as_phase_array
from utils.numerics import symplectic_matrix


@dataclass
class FixedPointRecord:
    """A zero of H_p with its linearization."""

    location: PhasePoint
    energy: float
    linearization: np.ndarray
    eigenvalues: np.ndarray
    hyperbolic: bool
    rates: np.ndarray
    residual: float
    eigenvectors: np.ndarray = field(repr=False, default=None)

    @property
    def z(self) -> np.ndarray:
        return self.location.as_array

    def unstable_basis(self) -> np.ndarray:
        """Orthonormal basis (columns) of the unstable subspace, snapped to the axes."""
        return _subspace_basis(self.eigenvalues, self.eigenvectors, sign=+1)

    def stable_basis(self) -> np.ndarray:
        """Orthonormal basis (columns) of the stable subspace, snapped to the axes."""
        return _subspace_basis(self.eigenvalues, self.eigenvectors, sign=-1)

    def spectrum_defect(self) -> float:
        """Distance between the spectrum and its negative (Hamiltonian symmetry)."""
        ev = np.sort_complex(self.eigenvalues)
        mirrored = np.sort_complex(-self.eigenvalues)
        return float(np.max(np.abs(ev - mirrored)))

    def as_row(self) -> dict:
        row = {f"x{i + 1}": v for i, v in enumerate(self.location.x)}
        row.update({f"xi{i + 1}": v for i, v in enumerate(self.location.xi)})
        row.update({
            'energy': self.energy,
            'hyperbolic': bool(self.hyperbolic),
            'residual': self.residual,
            'spectrum_defect': self.spectrum_defect(),
        })
        for k, rate in enumerate(self.rates):
            row[f"rate{k + 1}"] = float(rate)
        return row


def _subspace_basis(eigenvalues: np.ndarray, eigenvectors: np.ndarray, sign: int) -> np.ndarray:
    """
    Real orthonormal basis of the (un)stable subspace.

    Canonical unit vectors are projected onto the subspace and
    orthonormalized in order, so that a subspace containing coordinate
    directions is spanned by exact axis-aligned vectors.
    """
    mask = sign * eigenvalues.real > settings.SPECTRAL_TOL
    dim = int(mask.sum())
    if dim == 0:
        return np.zeros((eigenvectors.shape[0], 0))
    vectors = eigenvectors[:, mask]
    real = np.concatenate([vectors.real, vectors.imag], axis=1)
    left, _, _ = np.linalg.svd(real)
    q = left[:, :dim]
    projector = q @ q.T

    basis: List[np.ndarray] = []
    for i in range(projector.shape[0]):
        v = projector[:, i].copy()
        for b in basis:
            v -= (b @ v) * b
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            continue
        v /= norm
        v[np.abs(v) < 1e-12 * np.max(np.abs(v))] = 0.0
        v /= np.linalg.norm(v)
        basis.append(v)
        if len(basis) == dim:
            break
    return np.column_stack(basis) if basis else np.zeros((projector.shape[0], 0))


def linearization(s, z: np.ndarray) -> np.ndarray:
    """Jacobian of H_p at z: J Hess(p)."""
    return symplectic_matrix(s.n) @ s.hessian(z)


def classify_fixed_point(s, z: np.ndarray) -> FixedPointRecord:
    """Build the FixedPointRecord of a converged root."""
    A = linearization(s, z)
    eigenvalues, eigenvectors = np.linalg.eig(A)
    hyperbolic = bool(np.all(np.abs(eigenvalues.real) > settings.SPECTRAL_TOL))
    rates = np.sort(eigenvalues.real[eigenvalues.real > settings.SPECTRAL_TOL])
    residual = float(np.linalg.norm(s.field(z)))
    return FixedPointRecord(
        location=PhasePoint.from_array(z),
        energy=float(s.value(z)),
        linearization=A,
        eigenvalues=eigenvalues,
        hyperbolic=hyperbolic,
        rates=rates,
        residual=residual,
        eigenvectors=eigenvectors,
    )


def _newton(s, z0: np.ndarray, rng: np.random.Generator) -> Optional[np.ndarray]:
    """Damped Newton on H_p = 0; None on divergence or repeated singularity."""
    z = z0.copy()
    restarted = False
    for _ in range(settings.NEWTON_MAX_ITER):
        F = s.field(z)
        norm = np.linalg.norm(F)
        if norm <= settings.NEWTON_TOL:
            return z
        A = linearization(s, z)
        try:
            if np.linalg.cond(A) > 1e14:
                raise np.linalg.LinAlgError("singular Jacobian")
            step = np.linalg.solve(A, -F)
        except np.linalg.LinAlgError:
            if restarted:
                print(f"    Dropped seed {np.round(z0, 6).tolist()}: singular Jacobian after restart")
                return None
            restarted = True
            z = z + 1e-6 * rng.standard_normal(z.size)
            continue
        damping = 1.0
        while damping > 1e-4:
            candidate = z + damping * step
            if np.linalg.norm(s.field(candidate)) < norm:
                break
            damping *= 0.5
        z = z + damping * step
        if np.linalg.norm(z - z0) > settings.NEWTON_DIVERGENCE_RADIUS or not np.all(np.isfinite(z)):
            print(f"    Dropped seed {np.round(z0, 6).tolist()}: Newton diverged")
            return None
    if np.linalg.norm(s.field(z)) <= 1e3 * settings.NEWTON_TOL:
        return z
    print(f"    Dropped seed {np.round(z0, 6).tolist()}: no convergence in {settings.NEWTON_MAX_ITER} steps")
    return None


def find_fixed_points(s, seeds: Optional[Iterable] = None, seed: int = 0) -> List[FixedPointRecord]:
    """
    Locate and classify zeros of the Hamiltonian field.

    Args:
        s: Scalar symbol
        seeds: Starting points (defaults to the symbol's fixed_point_seeds)
        seed: Random seed for the perturbed restart

    Returns:
        FixedPointRecords, de-duplicated within DEDUP_RADIUS, in seed order
    """
    if seeds is None:
        seeds = s.fixed_point_seeds()
    rng = np.random.default_rng(seed)
    records: List[FixedPointRecord] = []
    for start in seeds:
        z0 = as_phase_array(start, s.n)
        root = _newton(s, z0, rng)
        if root is None:
            continue
        if any(np.linalg.norm(root - r.z) < settings.DEDUP_RADIUS for r in records):
            continue
        records.append(classify_fixed_point(s, root))
    return records
