"""
Fractal Package
===============
Cantor sets of prescribed dimension, the normal-form phase model and its
pullback potential, heteroclinic fibers and box-counting dimension.
"""

from .cantor import CantorSpec, ZeroSetFunction, cantor_build, point_set, zero_set_function
from .phase_model import (
    PhaseFunction,
    PhaseModel,
    PullbackPotential,
    ScalingReport,
    SignStructureReport,
    derivative_scaling,
    embed_phase_model,
    fiber_residual,
    heteroclinic_extract,
    phase_build,
    pullback_potential,
    sign_structure_check,
)
from .dimension import DimensionReport, box_dimension, dimension_tolerance, product_cloud, scale_ladder

__all__ = [
    'CantorSpec', 'ZeroSetFunction', 'cantor_build', 'point_set', 'zero_set_function',
    'PhaseFunction', 'PhaseModel', 'PullbackPotential', 'ScalingReport', 'SignStructureReport',
    'derivative_scaling', 'embed_phase_model', 'fiber_residual', 'heteroclinic_extract',
    'phase_build', 'pullback_potential', 'sign_structure_check',
    'DimensionReport', 'box_dimension', 'dimension_tolerance', 'product_cloud', 'scale_ladder',
]
