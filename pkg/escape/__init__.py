"""
Escape Package
==============
Local and glued escape functions around hyperbolic fixed points and the
pointwise verification of the scalar, quartic and matrix escape inequalities.
"""

from .local import (
    fit_local_constant,
    local_escape_bracket,
    local_escape_eval,
    local_escape_gradient,
    normal_form_bracket,
)
from .assembly import (
    ConfinementReport,
    ConstructionError,
    EscapeAssembly,
    EscapeFunction,
    GlueCutoffs,
    IdentityReport,
    OuterEscape,
    TransportError,
    TransportLine,
    build_assembly,
    choose_ball_radius,
    choose_c2,
    confinement_report,
    g0_bracket,
    g0_eval,
    glue_weight,
    identity_report,
    line_integrals,
    transport_F,
    transport_line,
    tube_samples,
)
from .verify import (
    MarginReport,
    QuarticWindows,
    check_quartic_windows,
    escape_bracket_parts,
    fit_quartic_floor,
    matrix_escape_terms,
    matrix_surface_samples,
    quartic_factor_values,
    quartic_shell_samples,
    scalar_margin,
    shell_samples,
    verify_escape,
    verify_matrix_escape,
    verify_quartic_escape,
    yeta_bracket,
)
from .gluing import assemble_G, nu_ladder

__all__ = [
    'fit_local_constant', 'local_escape_bracket', 'local_escape_eval', 'local_escape_gradient',
    'normal_form_bracket',
    'ConfinementReport', 'ConstructionError', 'EscapeAssembly', 'EscapeFunction', 'GlueCutoffs',
    'OuterEscape', 'TransportError', 'TransportLine', 'build_assembly', 'choose_ball_radius',
    'choose_c2', 'confinement_report', 'g0_bracket', 'g0_eval', 'glue_weight', 'IdentityReport',
    'identity_report', 'line_integrals',
    'transport_F', 'transport_line', 'tube_samples',
    'MarginReport', 'QuarticWindows', 'check_quartic_windows', 'escape_bracket_parts',
    'fit_quartic_floor', 'matrix_escape_terms', 'matrix_surface_samples', 'quartic_factor_values',
    'quartic_shell_samples', 'scalar_margin', 'shell_samples', 'verify_escape',
    'verify_matrix_escape', 'verify_quartic_escape', 'yeta_bracket',
    'assemble_G', 'nu_ladder',
]
