"""
Glued Escape Function
=====================
Builds G = nu psi_0 G_0 + G_inf around two hyperbolic fixed points rho_1,
rho_2 joined by heteroclinic trajectories.

This module handles:
- The ball radius eps, the transport time T and the Omega hits, i.e. the
  first exits of the heteroclinic captures through S(rho_1, eps/4)
- The transport quotient F, constant along each flow line from Omega
- G_0: G_1 near rho_1, G_2 near rho_2 and the accumulated integral of
  chi_1 H_p G_1 + chi_0 F + chi_2 H_p G_2 in between
- The outer surrogate G_inf = (1 - taper) x.xi
- The transport identities of G_0 checked along flow lines
- The flow-confinement properties of the Omega tube
"""

from dataclasses import dataclass, field, replace
from functools import cached_property, partial
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from config import settings
from dynamics.classify import _escape_function, default_escape_radius
from dynamics.fixed_points import FixedPointRecord
from dynamics.heteroclinic import HeteroclinicCapture
from dynamics.integrator import Trajectory, integrate
from escape.local import local_escape_bracket, local_escape_eval
from symbols.base import PointLike, as_phase_array
from symbols.bumps import SmoothBump, SmoothStep
from utils.numerics import central_gradient, make_rng
from utils.parallel import parallel_map


class TransportError(Exception):
    """A point is not on a transport line from Omega, or the chi_0 integral vanishes."""


class ConstructionError(Exception):
    """The escape function could not be built or tuned; carries the worst sample."""

    def __init__(self, message: str, worst_sample=None, report=None):
        super().__init__(message)
        self.worst_sample = None if worst_sample is None else np.asarray(worst_sample, dtype=float)
        self.report = report


# =============================================================================
# CUTOFFS
# =============================================================================
@dataclass(frozen=True, eq=False)
class GlueCutoffs:
    """
    chi_1, chi_2: 1 on B(rho_j, 0.8 eps), 0 outside B(rho_j, 0.95 eps).
    chi_0 = (1 - b_1)(1 - b_2) with b_j = 1 on B(rho_j, 0.55 eps).
    """

    rho1: np.ndarray
    rho2: np.ndarray
    eps: float

    @property
    def chi_ball(self) -> SmoothBump:
        return SmoothBump(0.8 * self.eps, 0.95 * self.eps)

    @property
    def gap_ball(self) -> SmoothBump:
        return SmoothBump(0.55 * self.eps, 0.7 * self.eps)

    def values(self, z: np.ndarray):
        """(chi_0, chi_1, chi_2) at z."""
        d1 = float(np.linalg.norm(z - self.rho1))
        d2 = float(np.linalg.norm(z - self.rho2))
        chi, gap = self.chi_ball, self.gap_ball
        chi0 = (1.0 - gap.profile(d1)) * (1.0 - gap.profile(d2))
        return float(chi0), float(chi.profile(d1)), float(chi.profile(d2))

    def chi0(self, z: np.ndarray) -> float:
        return self.values(z)[0]

    def chi1(self, z: np.ndarray) -> float:
        return self.values(z)[1]

    def chi2(self, z: np.ndarray) -> float:
        return self.values(z)[2]


# =============================================================================
# OUTER ESCAPE FUNCTION
# =============================================================================
@dataclass(eq=False)
class OuterEscape:
    """G_inf = (1 - taper) x.xi; taper is 1 within `inner` of the reference cloud, 0 beyond `outer`."""

    reference: np.ndarray
    inner: float
    outer: float
    margin_report: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        self.reference = np.atleast_2d(np.asarray(self.reference, dtype=float))
        if len(self.reference) == 0:
            raise ValueError("OuterEscape needs a non-empty reference cloud")
        if not 0 < self.inner < self.outer:
            raise ValueError(f"taper radii must satisfy 0 < inner < outer, got {self.inner}, {self.outer}")

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.reference)

    @property
    def n(self) -> int:
        return self.reference.shape[1] // 2

    @property
    def declared_radius(self) -> float:
        """Beyond this phase-space radius G_inf is exactly x.xi."""
        return float(np.max(np.linalg.norm(self.reference, axis=1)) + self.outer)

    def distance(self, z: np.ndarray) -> float:
        d, _ = self.tree.query(z)
        return float(d)

    def taper(self, z: np.ndarray, distance: Optional[float] = None) -> float:
        d = self.distance(z) if distance is None else distance
        return float(SmoothBump(self.inner, self.outer).profile(d))

    def value(self, z: np.ndarray, distance: Optional[float] = None) -> float:
        n = self.n
        product = float(z[:n] @ z[n:])
        taper = self.taper(z, distance)
        return product if taper == 0.0 else (1.0 - taper) * product

    def shrink(self, factor: float = 0.5) -> 'OuterEscape':
        return OuterEscape(self.reference, self.inner * factor, self.outer * factor)


# =============================================================================
# ASSEMBLY
# =============================================================================
@dataclass(eq=False)
class EscapeAssembly:
    """Every ingredient of G = nu psi_0 G_0 + G_inf."""

    rho1: FixedPointRecord
    rho2: FixedPointRecord
    eps_ball: float
    T_transport: float
    C2: float
    omega_hits: np.ndarray
    tube_radius: float
    cutoffs: GlueCutoffs
    nu_glue: float
    outer: OuterEscape
    reference: np.ndarray
    horizon: float
    h_samples: np.ndarray = field(default=None, repr=False)

    @cached_property
    def hit_tree(self) -> cKDTree:
        return cKDTree(self.omega_hits)

    @cached_property
    def reference_tree(self) -> cKDTree:
        return cKDTree(self.reference)

    @property
    def declared_radius(self) -> float:
        """Beyond this phase-space radius G = x.xi exactly."""
        cloud = float(np.max(np.linalg.norm(self.reference, axis=1)))
        return max(self.outer.declared_radius, cloud + self.eps_ball)

    def as_dict(self) -> dict:
        return {
            'eps_ball': self.eps_ball,
            'T_transport': self.T_transport,
            'C2': self.C2,
            'nu_glue': self.nu_glue,
            'tube_radius': self.tube_radius,
            'omega_hits': self.omega_hits.tolist(),
            'taper_inner': self.outer.inner,
            'taper_outer': self.outer.outer,
            'declared_radius': self.declared_radius,
            'reference_points': int(len(self.reference)),
        }


def choose_ball_radius(s, rho1: FixedPointRecord, rho2: FixedPointRecord) -> float:
    """eps = 1/4 min(|rho_1 - rho_2|, distance from rho_1 and rho_2 to the absorption window)."""
    candidates = [float(np.linalg.norm(rho1.z - rho2.z))]
    if s.absorption is not None:
        candidates += [max(s.absorption.signed_distance(r.z), 0.0) for r in (rho1, rho2)]
    eps = 0.25 * min(candidates)
    if not eps > 0:
        raise ValueError(f"ball radius must be positive, got {eps} (fixed point inside the absorption window?)")
    return eps


# =============================================================================
# TRANSPORT LINES
# =============================================================================
@dataclass
class TransportLine:
    """rho = omega(time) for omega(0) = omega0 on S(rho_1, eps/4)."""

    omega0: np.ndarray
    time: float
    trajectory: Trajectory = field(repr=False)


def _sphere_distance(center: np.ndarray, radius: float, z: np.ndarray) -> float:
    return float(np.linalg.norm(z - center) - radius)


def transport_line(assembly: EscapeAssembly, s, rho: PointLike) -> TransportLine:
    """
    Locate omega(0) on S(rho_1, eps/4) for the flow line through rho.

    Outside B(rho_1, eps/4) the flow is followed backward to the sphere;
    inside it is followed forward to the outward crossing (time < 0).
    The returned trajectory runs forward from omega(0) over [0, max(time, T)].

    Raises:
        TransportError: The sphere is not reached within the assembly horizon
    """
    z = as_phase_array(rho, s.n)
    sphere = partial(_sphere_distance, assembly.rho1.z, 0.25 * assembly.eps_ball)
    gap = sphere(z)

    if abs(gap) <= 1e-12:
        omega0, time = z, 0.0
    else:
        inside = gap < 0
        span = assembly.horizon if inside else -assembly.horizon
        events = [
            ('sphere', sphere, 1.0 if inside else -1.0, 0.25 * assembly.eps_ball),
            ('escape', partial(_escape_function, s, default_escape_radius(s), float(np.sign(span))), 1.0),
        ]
        seek = integrate(s, z, (0.0, span), events=events, dense=False)
        if seek.event != 'sphere':
            raise TransportError(
                f"flow through {np.round(z, 6).tolist()} does not reach S(rho_1, eps/4) "
                f"within |t| <= {assembly.horizon:g}"
            )
        omega0, time = seek.points[-1], -float(seek.event_time)

    length = max(time, assembly.T_transport)
    trajectory = integrate(s, omega0, (0.0, length))
    if trajectory.status != 'ok' or trajectory.dense is None:
        raise TransportError(f"integration from omega(0) failed ({trajectory.status})")
    return TransportLine(np.asarray(omega0, dtype=float), time, trajectory)


def _transport_integrand(assembly: EscapeAssembly, s, trajectory: Trajectory, t: float) -> np.ndarray:
    """(chi_1 H_p G_1 + chi_2 H_p G_2, chi_0) at omega(t)."""
    z = trajectory.at(t)
    chi0, chi1, chi2 = assembly.cutoffs.values(z)
    local = 0.0
    if chi1:
        local += chi1 * local_escape_bracket(s, assembly.rho1, z)
    if chi2:
        local += chi2 * local_escape_bracket(s, assembly.rho2, z)
    return np.array([local, chi0])


def line_integrals(assembly: EscapeAssembly, s, line: TransportLine, t_end: float) -> np.ndarray:
    """Integrals of (chi_1 H_p G_1 + chi_2 H_p G_2, chi_0) over [0, t_end] on the dense output."""
    if t_end <= 0:
        return np.zeros(2)
    values, _ = quad_vec(
        partial(_transport_integrand, assembly, s, line.trajectory), 0.0, t_end,
        epsabs=settings.QUAD_TOL, epsrel=settings.QUAD_TOL,
    )
    return np.asarray(values, dtype=float)


def _g1(assembly: EscapeAssembly, z: np.ndarray) -> float:
    return local_escape_eval(1, assembly.rho1, 0.0, z)


def _g2(assembly: EscapeAssembly, z: np.ndarray) -> float:
    return local_escape_eval(2, assembly.rho2, assembly.C2, z)


def _transport_parts(assembly: EscapeAssembly, s, line: TransportLine):
    """(G_2(omega(T)) - G_1(omega(0)) - local integral, chi_0 integral) over [0, T]."""
    T = assembly.T_transport
    local, chi0 = line_integrals(assembly, s, line, T)
    if chi0 < settings.DENOM_FLOOR:
        raise TransportError(
            f"chi_0 integral {chi0:.3e} below {settings.DENOM_FLOOR:g} on the line from "
            f"{np.round(line.omega0, 6).tolist()}"
        )
    numerator = _g2(assembly, line.trajectory.at(T)) - _g1(assembly, line.omega0) - local
    return float(numerator), float(chi0)


def line_quotient(assembly: EscapeAssembly, s, line: TransportLine) -> float:
    numerator, chi0 = _transport_parts(assembly, s, line)
    return numerator / chi0


def transport_F(assembly: EscapeAssembly, s, rho: PointLike) -> float:
    """
    F on the flow line through rho.

    Args:
        assembly: EscapeAssembly
        s: Scalar symbol
        rho: Point on a flow line from Omega

    Returns:
        (G_2(omega(T)) - G_1(omega(0)) - int_0^T (chi_1 H_p G_1 + chi_2 H_p G_2)) / int_0^T chi_0

    Raises:
        TransportError: No sphere hit, or the chi_0 integral is below DENOM_FLOOR
    """
    return line_quotient(assembly, s, transport_line(assembly, s, rho))


def _accumulate(assembly: EscapeAssembly, s, line: TransportLine) -> float:
    F = line_quotient(assembly, s, line)
    local, chi0 = line_integrals(assembly, s, line, line.time)
    return _g1(assembly, line.omega0) + local + F * chi0


def g0_eval(assembly: EscapeAssembly, s, rho: PointLike) -> float:
    """
    G_0 at rho.

    G_1 inside B(rho_1, eps/4), G_2 inside B(rho_2, eps/4); on the tube
    G_1(omega(0)) plus the integral of chi_1 H_p G_1 + chi_0 F + chi_2 H_p G_2
    along the flow line up to rho.

    Raises:
        TransportError: As transport_F
    """
    z = as_phase_array(rho, s.n)
    quarter = 0.25 * assembly.eps_ball
    if np.linalg.norm(z - assembly.rho1.z) < quarter:
        return _g1(assembly, z)
    if np.linalg.norm(z - assembly.rho2.z) < quarter:
        return _g2(assembly, z)
    return _accumulate(assembly, s, transport_line(assembly, s, z))


def g0_bracket(assembly: EscapeAssembly, s, rho: PointLike) -> float:
    """chi_1 H_p G_1 + chi_0 F + chi_2 H_p G_2 at rho (H_p G_0 on the tube)."""
    z = as_phase_array(rho, s.n)
    chi0, chi1, chi2 = assembly.cutoffs.values(z)
    value = chi1 * local_escape_bracket(s, assembly.rho1, z) + chi2 * local_escape_bracket(s, assembly.rho2, z)
    if chi0:
        value += chi0 * transport_F(assembly, s, z)
    return float(value)


# =============================================================================
# GLUED FUNCTION
# =============================================================================
def _time_taper(T: float, t: float) -> float:
    """1 for t <= T, 0 for t >= 3T/2."""
    return 1.0 - float(SmoothStep(T, 1.5 * T).value(t))


def glue_weight(assembly: EscapeAssembly, z: np.ndarray, line: Optional[TransportLine],
                reference_distance: Optional[float] = None) -> float:
    """
    psi_0 = b_K [1 - (1 - b_1)(1 - b_2)(1 - b_tube)].

    b_K screens to the eps-neighbourhood of the reference cloud, b_j covers
    B(rho_j, eps/4), and b_tube is 1 on flow lines leaving Omega within half
    the tube radius of a hit, up to time T.
    """
    eps = assembly.eps_ball
    if reference_distance is None:
        reference_distance = float(assembly.reference_tree.query(z)[0])
    screen = SmoothBump(0.5 * eps, eps).profile(reference_distance)
    if screen == 0.0:
        return 0.0
    ball = SmoothBump(eps / 8.0, eps / 4.0)
    b1 = ball.profile(np.linalg.norm(z - assembly.rho1.z))
    b2 = ball.profile(np.linalg.norm(z - assembly.rho2.z))
    tube = 0.0
    if line is not None:
        d, _ = assembly.hit_tree.query(line.omega0)
        tube = SmoothBump(0.5 * assembly.tube_radius, assembly.tube_radius).profile(d)
        tube *= _time_taper(assembly.T_transport, line.time)
    return float(screen * (1.0 - (1.0 - b1) * (1.0 - b2) * (1.0 - tube)))


class EscapeFunction:
    """
    G = nu psi_0 G_0 + G_inf as a picklable callable.

    The gradient is a central difference with step FD_STEP_GRADIENT.
    """

    def __init__(self, assembly: EscapeAssembly, s):
        self.assembly = assembly
        self.symbol = s

    @property
    def nu(self) -> float:
        return self.assembly.nu_glue

    def parts(self, rho: PointLike) -> dict:
        """psi_0, G_0, taper and G_inf at rho."""
        a, s = self.assembly, self.symbol
        z = as_phase_array(rho, s.n)
        distance = float(a.reference_tree.query(z)[0])
        parts = {
            'taper': a.outer.taper(z),
            'g_inf': a.outer.value(z),
            'psi0': 0.0,
            'g0': 0.0,
        }
        if distance >= a.eps_ball:
            return parts

        try:
            line = transport_line(a, s, z)
        except TransportError:
            line = None
        psi0 = glue_weight(a, z, line, distance)
        parts['psi0'] = psi0
        if psi0 == 0.0:
            return parts

        quarter = 0.25 * a.eps_ball
        if np.linalg.norm(z - a.rho1.z) < quarter:
            parts['g0'] = _g1(a, z)
        elif np.linalg.norm(z - a.rho2.z) < quarter:
            parts['g0'] = _g2(a, z)
        else:
            parts['g0'] = _accumulate(a, s, line)
        return parts

    def glued_part(self, rho: PointLike) -> float:
        """psi_0 G_0."""
        parts = self.parts(rho)
        return parts['psi0'] * parts['g0']

    def outer_part(self, rho: PointLike) -> float:
        """G_inf."""
        return self.assembly.outer.value(as_phase_array(rho, self.symbol.n))

    def __call__(self, rho: PointLike) -> float:
        parts = self.parts(rho)
        if parts['psi0'] == 0.0:
            return parts['g_inf']
        return self.nu * parts['psi0'] * parts['g0'] + parts['g_inf']

    def gradient(self, rho: PointLike) -> np.ndarray:
        return central_gradient(self, as_phase_array(rho, self.symbol.n), settings.FD_STEP_GRADIENT)

    def bracket(self, rho: PointLike) -> float:
        """H_p G = grad G . H_p."""
        z = as_phase_array(rho, self.symbol.n)
        return float(self.gradient(z) @ self.symbol.field(z))


# =============================================================================
# CONSTRUCTION
# =============================================================================
def _crossings(trajectory: Trajectory, center: np.ndarray, radius: float, t_from: float,
               outward: bool) -> Optional[float]:
    """First time after t_from where |z - center| crosses radius (outward or inward)."""
    t_end = float(trajectory.times[-1])
    if t_end <= t_from:
        return None
    times = np.union1d(np.linspace(t_from, t_end, 4000), trajectory.times[trajectory.times >= t_from])
    gaps = np.linalg.norm(trajectory.at(times) - center, axis=1) - radius
    if outward:
        index = np.nonzero((gaps[:-1] < 0) & (gaps[1:] >= 0))[0]
    else:
        index = np.nonzero((gaps[:-1] > 0) & (gaps[1:] <= 0))[0]
    if not len(index):
        return None
    i = int(index[0])
    return float(brentq(lambda t: np.linalg.norm(trajectory.at(t) - center) - radius,
                        times[i], times[i + 1], xtol=1e-14))


def choose_c2(assembly: EscapeAssembly, s, attempts: int = 8) -> float:
    """
    Smallest power of 2 with F >= 1 on the Omega hits, re-checked on the H samples.

    F = (C_2 + A) / int chi_0 at fixed omega(0), so C_2 >= int chi_0 - A on every line.
    """
    trial = replace(assembly, C2=0.0)
    need = []
    for hit in assembly.omega_hits:
        numerator, chi0 = _transport_parts(trial, s, transport_line(trial, s, hit))
        need.append(chi0 - numerator)
    largest = max(need)
    C2 = 2.0 ** np.ceil(np.log2(largest)) if largest > 1.0 else 1.0

    samples = assembly.h_samples if assembly.h_samples is not None else assembly.omega_hits
    for _ in range(attempts):
        trial = replace(assembly, C2=float(C2))
        values = [transport_F(trial, s, z) for z in samples]
        worst = int(np.argmin(values))
        if values[worst] >= 1.0:
            return float(C2)
        print(f"    C2 = {C2:g} leaves min F = {values[worst]:.6g} on H, doubling")
        C2 *= 2.0
    raise ConstructionError(f"no C2 up to {C2:g} gives F >= 1 on the heteroclinic samples",
                            worst_sample=samples[worst])


def build_assembly(s, rho1: FixedPointRecord, rho2: FixedPointRecord,
                   captures: Sequence[HeteroclinicCapture],
                   trapped_points: Optional[np.ndarray] = None,
                   tube_radius: float = settings.TUBE_RADIUS,
                   nu: float = 1.0, samples_per_capture: int = 12) -> EscapeAssembly:
    """
    Build the escape assembly from heteroclinic captures rho_1 -> rho_2.

    Args:
        s: Scalar symbol
        rho1: Departure fixed point (C_1 = 0 there)
        rho2: Arrival fixed point
        captures: Heteroclinic captures from rho1 to rho2
        trapped_points: Optional trapped-set sample added to the reference cloud
        tube_radius: Radius of the Omega tube around the hits
        nu: Initial gluing weight
        samples_per_capture: Points of H per capture used to re-check F >= 1

    Returns:
        EscapeAssembly with C_2 chosen

    Raises:
        ConstructionError: No capture leaves B(rho_1, eps/4) or reaches B(rho_2, eps/8)
    """
    if not captures:
        raise ConstructionError("no heteroclinic captures from rho_1 to rho_2")
    eps = choose_ball_radius(s, rho1, rho2)
    quarter = 0.25 * eps

    hits: List[np.ndarray] = []
    durations: List[float] = []
    h_samples: List[np.ndarray] = []
    for capture in captures:
        trajectory = capture.trajectory
        t_hit = _crossings(trajectory, rho1.z, quarter, float(trajectory.times[0]), outward=True)
        if t_hit is None:
            print(f"    Excluded capture theta={capture.theta:.6f}: never leaves B(rho_1, eps/4)")
            continue
        t_in = _crossings(trajectory, rho2.z, eps / 8.0, t_hit, outward=False)
        if t_in is None:
            raise ConstructionError(f"capture at theta={capture.theta:.6f} never enters B(rho_2, eps/8)",
                                    worst_sample=trajectory.final)
        hits.append(trajectory.at(t_hit))
        durations.append(t_in - t_hit)
        for z in trajectory.at(np.linspace(t_hit, t_in, samples_per_capture + 2)[1:-1]):
            if np.linalg.norm(z - rho1.z) > quarter and np.linalg.norm(z - rho2.z) > quarter:
                h_samples.append(z)
    if not hits:
        raise ConstructionError("no capture leaves B(rho_1, eps/4)")

    T = float(max(durations))
    cloud = [rho1.z[None, :], rho2.z[None, :]] + [c.points() for c in captures]
    if trapped_points is not None and len(trapped_points):
        cloud.append(np.atleast_2d(trapped_points))
    reference = np.vstack(cloud)

    assembly = EscapeAssembly(
        rho1=rho1,
        rho2=rho2,
        eps_ball=eps,
        T_transport=T,
        C2=0.0,
        omega_hits=np.array(hits),
        tube_radius=float(tube_radius),
        cutoffs=GlueCutoffs(rho1.z, rho2.z, eps),
        nu_glue=float(nu),
        outer=OuterEscape(reference, 0.25 * tube_radius, 0.5 * tube_radius),
        reference=reference,
        horizon=1.5 * T + 1.0,
        h_samples=np.array(h_samples) if h_samples else None,
    )
    return replace(assembly, C2=choose_c2(assembly, s))


# =============================================================================
# TRANSPORT IDENTITIES
# =============================================================================
@dataclass
class IdentityReport:
    """
    Identities of G_0 checked along flow lines from Omega:
    F is constant on each line, G_0 meets G_1 and G_2 where the line leaves
    B(rho_1, 0.3 eps) and enters B(rho_2, 0.3 eps), and g0_bracket equals
    the flow-time derivative of G_0 halfway between.
    """

    F_values: List[List[float]]
    g1_mismatch: float
    g2_mismatch: float
    bracket_residual: float
    tol: float

    @property
    def F_spread(self) -> float:
        return max((max(v) - min(v) for v in self.F_values), default=0.0)

    @property
    def passed(self) -> bool:
        return max(self.F_spread, self.g1_mismatch, self.g2_mismatch, self.bracket_residual) <= self.tol

    def as_dict(self) -> dict:
        return {
            'lines': len(self.F_values),
            'F_values': self.F_values,
            'F_spread': self.F_spread,
            'g1_mismatch': self.g1_mismatch,
            'g2_mismatch': self.g2_mismatch,
            'bracket_residual': self.bracket_residual,
            'tol': self.tol,
            'passed': self.passed,
        }


def identity_report(assembly: EscapeAssembly, s, lines: int = 2, points: int = 5,
                    flow_step: float = settings.IDENTITY_FLOW_STEP,
                    tol: float = settings.IDENTITY_TOL) -> IdentityReport:
    """
    Check the transport identities of G_0 on the first `lines` Omega hits.

    Args:
        assembly: EscapeAssembly with C_2 chosen
        s: Scalar symbol
        lines: Omega hits whose flow lines are checked
        points: F evaluations per line
        flow_step: Half-step h of the flow-time difference (G_0(t + h) - G_0(t - h)) / 2h
        tol: Largest accepted F spread, boundary mismatch and relative bracket residual

    Returns:
        IdentityReport

    Raises:
        ConstructionError: No checked line crosses both 0.3 eps spheres
    """
    eps = assembly.eps_ball
    spreads, g1_gap, g2_gap, residual = [], 0.0, 0.0, 0.0
    for hit in assembly.omega_hits[:lines]:
        trajectory = transport_line(assembly, s, hit).trajectory
        t_out = _crossings(trajectory, assembly.rho1.z, 0.3 * eps, 0.0, outward=True)
        t_in = None if t_out is None else _crossings(trajectory, assembly.rho2.z, 0.3 * eps, t_out, outward=False)
        if t_in is None:
            print(f"    Skipped line from {np.round(hit, 6).tolist()}: no 0.3 eps crossings")
            continue

        spreads.append([transport_F(assembly, s, z) for z in trajectory.at(np.linspace(t_out, t_in, points))])
        leave, enter = trajectory.at(t_out), trajectory.at(t_in)
        g1_gap = max(g1_gap, abs(g0_eval(assembly, s, leave) - _g1(assembly, leave)))
        g2_gap = max(g2_gap, abs(g0_eval(assembly, s, enter) - _g2(assembly, enter)))

        t_mid = 0.5 * (t_out + t_in)
        ahead = g0_eval(assembly, s, trajectory.at(t_mid + flow_step))
        behind = g0_eval(assembly, s, trajectory.at(t_mid - flow_step))
        bracket = g0_bracket(assembly, s, trajectory.at(t_mid))
        derivative = (ahead - behind) / (2.0 * flow_step)
        residual = max(residual, abs(bracket - derivative) / max(1.0, abs(bracket)))

    if not spreads:
        raise ConstructionError("no flow line from Omega crosses both 0.3 eps spheres")
    return IdentityReport(spreads, float(g1_gap), float(g2_gap), float(residual), tol)


# =============================================================================
# FLOW CONFINEMENT
# =============================================================================
@dataclass
class ConfinementReport:
    """
    Tube samples checked for the three confinement properties:
    omega(T) in B(rho_2, eps/4); omega stays in B(rho_1, eps/2) until its
    last visit to B(rho_1, 3 eps/8); it stays in B(rho_2, eps/2) after its
    first visit to B(rho_2, 3 eps/8). A failure means the tube or eps is
    too large, not that the construction is wrong.
    """

    samples: np.ndarray
    reaches_target: np.ndarray
    confined_start: np.ndarray
    confined_end: np.ndarray

    @property
    def failures(self) -> np.ndarray:
        ok = self.reaches_target & self.confined_start & self.confined_end
        return np.nonzero(~ok)[0]

    @property
    def parameter_failure(self) -> bool:
        return len(self.failures) > 0

    def as_rows(self) -> List[dict]:
        rows = []
        n = self.samples.shape[1] // 2 if len(self.samples) else 0
        for z, a, b, c in zip(self.samples, self.reaches_target, self.confined_start, self.confined_end):
            row = {f"x{i + 1}": z[i] for i in range(n)}
            row.update({f"xi{i + 1}": z[n + i] for i in range(n)})
            row.update({'reaches_target': bool(a), 'confined_start': bool(b), 'confined_end': bool(c)})
            rows.append(row)
        return rows

    def as_dict(self) -> dict:
        return {
            'samples': int(len(self.samples)),
            'failures': int(len(self.failures)),
            'parameter_failure': self.parameter_failure,
        }


def _confinement_task(args):
    s, z, rho1, rho2, eps, T = args
    trajectory = integrate(s, z, (0.0, T))
    if trajectory.dense is None or trajectory.status != 'ok':
        return False, False, False
    states = trajectory.at(np.linspace(0.0, T, 2001))
    d1 = np.linalg.norm(states - rho1, axis=1)
    d2 = np.linalg.norm(states - rho2, axis=1)
    reaches = bool(d2[-1] < 0.25 * eps)
    near1 = np.nonzero(d1 < 0.375 * eps)[0]
    start_ok = bool(np.all(d1[:near1[-1] + 1] < 0.5 * eps)) if len(near1) else True
    near2 = np.nonzero(d2 < 0.375 * eps)[0]
    end_ok = bool(np.all(d2[near2[0]:] < 0.5 * eps)) if len(near2) else True
    return reaches, start_ok, end_ok


def tube_samples(assembly: EscapeAssembly, per_hit: int = settings.CONFINEMENT_SAMPLES,
                 seed: int = 0) -> np.ndarray:
    """The hits plus `per_hit` points per hit within half the tube radius, on S(rho_1, eps/4)."""
    rng = make_rng(seed, 3)
    center = assembly.rho1.z
    quarter = 0.25 * assembly.eps_ball
    points = []
    for hit in assembly.omega_hits:
        points.append(hit)
        normal = (hit - center) / np.linalg.norm(hit - center)
        for _ in range(per_hit):
            v = rng.normal(size=hit.size)
            v -= (v @ normal) * normal
            v /= np.linalg.norm(v)
            z = hit + rng.uniform(0.0, 0.5 * assembly.tube_radius) * v
            points.append(center + quarter * (z - center) / np.linalg.norm(z - center))
    return np.array(points)


def confinement_report(assembly: EscapeAssembly, s, per_hit: int = settings.CONFINEMENT_SAMPLES,
                       seed: int = 0, workers: Optional[int] = None) -> ConfinementReport:
    """
    Check the flow-confinement properties of the Omega tube on samples.

    Args:
        assembly: EscapeAssembly
        s: Scalar symbol
        per_hit: Tube samples per Omega hit
        seed: Sampling seed
        workers: Process count

    Returns:
        ConfinementReport
    """
    samples = tube_samples(assembly, per_hit, seed)
    tasks = [(s, z, assembly.rho1.z, assembly.rho2.z, assembly.eps_ball, assembly.T_transport)
             for z in samples]
    results = parallel_map(_confinement_task, tasks, workers, description='Confinement')
    flags = np.array(results, dtype=bool).reshape(-1, 3)
    return ConfinementReport(samples, flags[:, 0], flags[:, 1], flags[:, 2])
