import numpy as np
import pytest

from config.scenarios import get_scenario
from dynamics import find_fixed_points, heteroclinic_shoot
from escape import (
    ConstructionError,
    EscapeFunction,
    assemble_G,
    build_assembly,
    g0_bracket,
    g0_eval,
    identity_report,
    local_escape_eval,
    transport_F,
    transport_line,
    verify_escape,
)
from pipeline import build_symbol


@pytest.fixture(scope='module')
def absorbed_assembly():
    s, _ = build_symbol(get_scenario('double_bump_absorbed'))
    rho1, rho2 = sorted([r for r in find_fixed_points(s) if r.hyperbolic], key=lambda r: r.z[0])
    captures = heteroclinic_shoot(s, rho1, rho2)
    return s, build_assembly(s, rho1, rho2, captures)


def _first_line(assembly, s, count=4001):
    line = transport_line(assembly, s, assembly.omega_hits[0])
    times = np.linspace(0.0, assembly.T_transport, count)
    return line, times, line.trajectory.at(times)


# =============================================================================
# CONSTRUCTION
# =============================================================================
def test_assembly_needs_captures(double_bump):
    rho1, rho2 = sorted([r for r in find_fixed_points(double_bump) if r.hyperbolic], key=lambda r: r.z[0])
    with pytest.raises(ConstructionError, match='no heteroclinic captures'):
        build_assembly(double_bump, rho1, rho2, [])


def test_assembly_ingredients(absorbed_assembly):
    s, assembly = absorbed_assembly
    assert assembly.eps_ball > 0.0 and assembly.T_transport > 0.0
    assert assembly.C2 >= 1.0 and np.log2(assembly.C2) == int(np.log2(assembly.C2))
    quarter = 0.25 * assembly.eps_ball
    np.testing.assert_allclose(np.linalg.norm(assembly.omega_hits - assembly.rho1.z, axis=1), quarter,
                               rtol=1e-8)


def test_F_is_at_least_one_on_the_hits(absorbed_assembly):
    s, assembly = absorbed_assembly
    assert min(transport_F(assembly, s, hit) for hit in assembly.omega_hits) >= 1.0


# =============================================================================
# TRANSPORT IDENTITIES
# =============================================================================
def test_F_is_constant_along_a_flow_line(absorbed_assembly):
    s, assembly = absorbed_assembly
    _, _, states = _first_line(assembly, s, count=9)
    values = [transport_F(assembly, s, z) for z in states[1:-1]]
    assert max(values) - min(values) <= 1e-6


def test_G0_meets_the_local_functions(absorbed_assembly):
    s, assembly = absorbed_assembly
    _, _, states = _first_line(assembly, s)
    eps = assembly.eps_ball
    d1 = np.linalg.norm(states - assembly.rho1.z, axis=1)
    d2 = np.linalg.norm(states - assembly.rho2.z, axis=1)

    leave = states[np.flatnonzero(d1 > 0.3 * eps)[0]]
    assert g0_eval(assembly, s, leave) == pytest.approx(local_escape_eval(1, assembly.rho1, 0.0, leave), abs=1e-6)
    enter = states[np.flatnonzero(d2 < 0.3 * eps)[0]]
    assert g0_eval(assembly, s, enter) == pytest.approx(
        local_escape_eval(2, assembly.rho2, assembly.C2, enter), abs=1e-6)


def test_bracket_is_the_flow_derivative_of_G0(absorbed_assembly):
    s, assembly = absorbed_assembly
    line, times, states = _first_line(assembly, s)
    t = times[np.argmin(np.abs(states[:, 0]))]
    z = line.trajectory.at(t)
    h = 5e-2
    derivative = (g0_eval(assembly, s, line.trajectory.at(t + h)) -
                  g0_eval(assembly, s, line.trajectory.at(t - h))) / (2.0 * h)
    bracket = g0_bracket(assembly, s, z)
    assert bracket == pytest.approx(derivative, rel=1e-6)
    # between the balls only chi_0 is on
    assert assembly.cutoffs.values(z) == (1.0, 0.0, 0.0)
    assert bracket == pytest.approx(transport_F(assembly, s, z), rel=1e-12)


def test_identity_report_passes(absorbed_assembly):
    s, assembly = absorbed_assembly
    report = identity_report(assembly, s)
    assert report.passed, report.as_dict()
    assert report.as_dict()['lines'] == min(2, len(assembly.omega_hits))
    assert report.F_spread <= 1e-6
    assert all(min(values) >= 1.0 for values in report.F_values)


def test_identity_report_fails_on_a_tight_tolerance(absorbed_assembly):
    s, assembly = absorbed_assembly
    assert not identity_report(assembly, s, lines=1, points=3, tol=0.0).passed


# =============================================================================
# GLUED FUNCTION
# =============================================================================
FAR_SAMPLES = np.array([
    [6.0, 0.0, 1.0, 0.0],
    [0.0, 6.0, 0.0, -1.0],
    [-6.0, 3.0, 0.6, 0.8],
])


def test_glued_function_is_x_dot_xi_far_away(absorbed_assembly):
    s, assembly = absorbed_assembly
    G = EscapeFunction(assembly, s)
    for z in FAR_SAMPLES:
        assert G(z) == pytest.approx(z[:2] @ z[2:])
        assert G.glued_part(z) == 0.0


def test_far_samples_pass_and_window_samples_are_excluded(absorbed_assembly):
    s, assembly = absorbed_assembly
    samples = np.vstack([FAR_SAMPLES, [[0.0, 0.0, -1.0, 0.0]]])
    report = verify_escape(assembly, s, samples, workers=1)
    assert report.excluded == 1
    assert len(report.samples) == len(FAR_SAMPLES)
    assert report.passed
    np.testing.assert_allclose(report.values, 2.0 * np.sum(FAR_SAMPLES[:, 2:] ** 2, axis=1), rtol=1e-6)


def test_assemble_G_keeps_the_largest_passing_nu(absorbed_assembly):
    s, assembly = absorbed_assembly
    G = assemble_G(assembly, s, FAR_SAMPLES, workers=1)
    assert G.nu == 1.0
    assert G.assembly.outer.margin_report.passed
