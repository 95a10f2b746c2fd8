"""
Utils Package
=============
Numeric helpers and the deterministic parallel map shared by all packages.
"""

from .numerics import (
    central_gradient,
    central_hessian,
    field_from_gradient,
    make_rng,
    symplectic_matrix,
    unit_circle,
)
from .parallel import parallel_map

__all__ = [
    'central_gradient',
    'central_hessian',
    'field_from_gradient',
    'make_rng',
    'symplectic_matrix',
    'unit_circle',
    'parallel_map',
]
