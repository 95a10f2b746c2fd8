"""
Symbols Package
===============
Phase-space symbols, their derivatives and the smooth cutoffs they are built from.
"""

from .bumps import SmoothBump, SmoothStep
from .base import (
    AbsorptionSpec,
    PhasePoint,
    SymbolModel,
    as_phase_array,
    eval_symbol,
    fd_gradient,
    fd_hessian,
    gradient,
    hamiltonian_field,
    hessian,
)
from .quadratic import QuadraticForm, QuadraticModel, RadialBarrier, radial_barrier_build
from .double_bump import DoubleBump
from .quartic import Quartic1D, Quartic2D, quartic_xi_lambda
from .matrix import DeterminantReduction, EigenBranch, MatrixSymbol, top_branch
from .surfaces import avoided_crossing_gap, matrix_energy_surface, surface_roots, trace_energy_surface

__all__ = [
    'SmoothBump',
    'SmoothStep',
    'AbsorptionSpec',
    'PhasePoint',
    'SymbolModel',
    'as_phase_array',
    'eval_symbol',
    'fd_gradient',
    'fd_hessian',
    'gradient',
    'hamiltonian_field',
    'hessian',
    'QuadraticForm',
    'QuadraticModel',
    'RadialBarrier',
    'radial_barrier_build',
    'DoubleBump',
    'Quartic1D',
    'Quartic2D',
    'quartic_xi_lambda',
    'DeterminantReduction',
    'EigenBranch',
    'MatrixSymbol',
    'top_branch',
    'avoided_crossing_gap',
    'matrix_energy_surface',
    'surface_roots',
    'trace_energy_surface',
]
