"""
Dynamics package: Hamiltonian flows, fixed points, trapped-set sampling,
heteroclinic shooting, manifold charts and flow diagnostics.
"""

from .integrator import Trajectory, integrate, energy_drift_along
from .fixed_points import FixedPointRecord, find_fixed_points, classify_fixed_point, linearization
from .classify import (
    Verdict,
    TrapClassification,
    ShellGrid,
    TrappedSetSample,
    classify,
    default_escape_radius,
    distance_to_set,
    momentum_roots,
    sample_trapped_set,
    shell_points,
)
from .heteroclinic import HeteroclinicCapture, heteroclinic_shoot, launch_direction
from .manifolds import (
    INCOMING,
    OUTGOING,
    AxisPatch,
    ChartRequest,
    FoldDetected,
    ManifoldChart,
    generating_function,
    manifold_mismatch,
)
from .diagnostics import (
    ConvexityReport,
    DegreeReport,
    GronwallReport,
    ScatteringReport,
    convexity_check,
    degree_diagnostic,
    gronwall_check,
    outgoing_launch,
    place_potential_window,
    reversal_defect,
    scattering_deflection,
    time_reversed,
    winding_number,
)

__all__ = [
    'Trajectory', 'integrate', 'energy_drift_along',
    'FixedPointRecord', 'find_fixed_points', 'classify_fixed_point', 'linearization',
    'Verdict', 'TrapClassification', 'ShellGrid', 'TrappedSetSample', 'classify',
    'default_escape_radius', 'distance_to_set', 'momentum_roots', 'sample_trapped_set', 'shell_points',
    'HeteroclinicCapture', 'heteroclinic_shoot', 'launch_direction',
    'INCOMING', 'OUTGOING', 'AxisPatch', 'ChartRequest', 'FoldDetected', 'ManifoldChart',
    'generating_function', 'manifold_mismatch',
    'ConvexityReport', 'DegreeReport', 'GronwallReport', 'ScatteringReport',
    'convexity_check', 'degree_diagnostic', 'gronwall_check', 'outgoing_launch',
    'place_potential_window', 'reversal_defect', 'scattering_deflection', 'time_reversed',
    'winding_number',
]
