"""
Flow Diagnostics
================
Numerical checks of the qualitative statements the constructions rely on.

This module handles:
- Groenwall separation bound between a symbol and its W-perturbation
- Degree (winding number) of the normalized outgoing map around rho_2
- Time reversal (x(-t), -xi(-t)) of even-in-xi symbols
- Scattering angles of a single radial barrier
- Convexity of t -> y(t)^2 for the quartic symbol
- Placement of the absorbing potential window on the tilted gamma_2
"""

from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from config import settings
from dynamics.classify import _escape_function, default_escape_radius, momentum_roots
from dynamics.fixed_points import FixedPointRecord
from dynamics.integrator import Trajectory, integrate
from symbols.base import AbsorptionSpec, PointLike, as_phase_array
from symbols.bumps import SmoothBump
from utils.numerics import unit_circle
from utils.parallel import parallel_map


# =============================================================================
# GROENWALL BOUND
# =============================================================================
@dataclass
class GronwallReport:
    """Smallest C with |rho(t) - rho_hat(t)| <= sqrt(nu) exp(2 C t) over all kept starts."""

    nu: float
    t_max: float
    fitted_c: float
    max_separation: float
    violations: int
    kept: int
    excluded: List[int] = field(default_factory=list)
    c_bound: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            'nu': self.nu, 't_max': self.t_max, 'fitted_c': self.fitted_c,
            'max_separation': self.max_separation, 'violations': self.violations,
            'kept': self.kept, 'excluded': list(self.excluded), 'c_bound': self.c_bound,
        }


def _separation_task(args):
    s_base, s_pert, z0, times = args
    first = integrate(s_base, z0, (0.0, times[-1]))
    second = integrate(s_pert, z0, (0.0, times[-1]))
    if first.status != 'ok' or second.status != 'ok':
        return None
    return np.linalg.norm(first.at(times) - second.at(times), axis=1)


def gronwall_check(s_base, s_pert, starts: Sequence[PointLike], nu: float, t_max: float,
                   samples: int = 401, c_bound: Optional[float] = None,
                   workers: Optional[int] = None) -> GronwallReport:
    """
    Paired integrations of a symbol and its perturbation from the same starts.

    Args:
        s_base: Unperturbed symbol
        s_pert: Symbol plus a W-potential of size O(sqrt(nu))
        starts: Common starting points
        nu: Scale parameter of the perturbation
        t_max: Length of the comparison window [0, t_max]
        samples: Time samples per pair
        c_bound: If given, violations are counted against this C instead of
            the fitted one
        workers: Process count

    Returns:
        GronwallReport
    """
    if nu <= 0 or t_max <= 0:
        raise ValueError(f"nu and t_max must be positive, got nu={nu}, t_max={t_max}")
    times = np.linspace(0.0, t_max, samples)
    tasks = [(s_base, s_pert, as_phase_array(z, s_base.n), times) for z in starts]
    separations = parallel_map(_separation_task, tasks, workers, description='Groenwall pairs')

    excluded = [k for k, sep in enumerate(separations) if sep is None]
    for k in excluded:
        print(f"    Excluded Groenwall start {k}: integrator failure")
    kept = [sep for sep in separations if sep is not None]
    if not kept:
        return GronwallReport(nu, t_max, np.nan, np.nan, 0, 0, excluded, c_bound)

    stacked = np.vstack(kept)
    worst = stacked.max(axis=0)
    root = np.sqrt(nu)
    positive = (times > 0) & (worst > 0)
    needed = np.log(worst[positive] / root) / (2.0 * times[positive]) if positive.any() else np.zeros(1)
    fitted_c = float(max(0.0, np.max(needed)))

    c_check = fitted_c if c_bound is None else c_bound
    bound = root * np.exp(2.0 * c_check * times)
    violations = int(np.sum(stacked > bound * (1.0 + 1e-9)))
    return GronwallReport(nu, t_max, fitted_c, float(worst.max()), violations, len(kept), excluded, c_bound)


# =============================================================================
# DEGREE OBSTRUCTION
# =============================================================================
@dataclass
class DegreeReport:
    """Winding number of F(t, .) per time, or an obstruction witness."""

    eps: float
    times: List[float]
    windings: List[Optional[int]]
    raw_windings: List[float]
    witnesses: List[Optional[dict]]

    @property
    def obstructed(self) -> bool:
        return any(w is not None for w in self.witnesses)

    def as_rows(self) -> List[dict]:
        rows = []
        for t, winding, raw, witness in zip(self.times, self.windings, self.raw_windings, self.witnesses):
            row = {'eps': self.eps, 'time': t, 'winding': winding, 'raw_winding': raw}
            row.update({f"witness_{k}": v for k, v in (witness or {}).items()})
            rows.append(row)
        return rows


def winding_number(directions: np.ndarray) -> float:
    """Total unwrapped angle of a closed sampled curve in the plane, in turns."""
    directions = np.asarray(directions, dtype=float)
    if len(directions) < 2:
        return 0.0
    angles = np.arctan2(directions[:, 1], directions[:, 0])
    steps = np.diff(np.append(angles, angles[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return float(steps.sum() / (2.0 * np.pi))


def outgoing_launch(s, record: FixedPointRecord, eps: float, omega: np.ndarray) -> np.ndarray:
    """
    The point (x_j + eps omega, xi(eps omega)) of the local outgoing manifold.

    xi comes from the graph xi = xi_j + S dx of the unstable subspace and is
    then rescaled along S dx onto the energy shell of the fixed point.
    """
    n = s.n
    basis = record.unstable_basis()
    ux, uxi = basis[:n], basis[n:]
    if basis.shape[1] != n or np.linalg.cond(ux) > 1e8:
        raise ValueError("outgoing manifold does not project on x-space at the fixed point")
    slope = uxi @ np.linalg.inv(ux)
    x = record.z[:n] + eps * np.asarray(omega, dtype=float)
    dxi = slope @ (eps * np.asarray(omega, dtype=float))
    xi0 = record.z[n:]

    def shifted(c):
        return s.value(np.concatenate([x, xi0 + c * dxi])) - record.energy

    try:
        c = brentq(shifted, 0.5, 1.5, xtol=settings.SHELL_TOL)
    except ValueError:
        c = 1.0
    return np.concatenate([x, xi0 + c * dxi])


def _degree_task(args):
    s, z0, x1, x2, times, dense_count = args
    trajectory = integrate(s, z0, (0.0, times[-1]))
    if trajectory.status != 'ok':
        return None
    grid = np.union1d(np.linspace(0.0, times[-1], dense_count), trajectory.times)
    states = trajectory.at(grid)[:, :s.n]
    d1 = np.linalg.norm(states - x1, axis=1)
    d2 = np.linalg.norm(states - x2, axis=1)
    positions = trajectory.at(np.asarray(times))[:, :s.n]
    min_d1 = [float(d1[grid <= t].min()) for t in times]
    min_d2 = [float(d2[grid <= t].min()) for t in times]
    return positions, min_d1, min_d2


def degree_diagnostic(s, rho2: FixedPointRecord, rho1_x: Sequence[float], eps: float,
                      times: Sequence[float], launches: int = 256,
                      collision_tol: float = settings.COLLISION_TOL,
                      workers: Optional[int] = None) -> DegreeReport:
    """
    Winding number of the normalized map F(t, omega) built from the outgoing manifold of rho_2.

    Args:
        s: Scalar symbol with n = 2
        rho2: Hyperbolic fixed point whose outgoing manifold is launched
        rho1_x: Position x_1 of the other fixed point
        eps: Radius of the launch circle around x_2
        times: Non-negative times, increasing
        launches: Points on the launch circle
        collision_tol: Distance to x_1 or x_2 reported as an obstruction
        workers: Process count

    Returns:
        DegreeReport (winding None where an obstruction witness was found)
    """
    if s.n != 2:
        raise ValueError(f"degree diagnostic needs n = 2, got n = {s.n}")
    times = [float(t) for t in times]
    if not times or min(times) < 0 or any(b < a for a, b in zip(times[:-1], times[1:])):
        raise ValueError(f"times must be non-negative and increasing, got {times}")
    x1 = np.asarray(rho1_x, dtype=float)
    x2 = rho2.z[:2]
    omegas = unit_circle(launches)
    starts = [outgoing_launch(s, rho2, eps, omega) for omega in omegas]
    span = times if times[-1] > 0 else times + [1e-12]
    tasks = [(s, z0, x1, x2, span, 4000) for z0 in starts]
    results = parallel_map(_degree_task, tasks, workers, description='Degree launches')

    reference = (x1 - x2) / float((x1 - x2) @ (x1 - x2))
    windings: List[Optional[int]] = []
    raw: List[float] = []
    witnesses: List[Optional[dict]] = []
    for k, t in enumerate(times):
        witness = None
        directions = np.zeros((launches, 2))
        for i, result in enumerate(results):
            if result is None:
                witness = {'kind': 'integrator_failure', 'omega': i, 'time': t, 'distance': np.nan}
                break
            positions, min_d1, min_d2 = result
            if min_d1[k] < collision_tol:
                witness = {'kind': 'collision_x1', 'omega': i, 'time': t, 'distance': min_d1[k]}
                break
            if t > 0 and min_d2[k] < collision_tol:
                witness = {'kind': 'collision_x2', 'omega': i, 'time': t, 'distance': min_d2[k]}
                break
            offset = positions[k] - x2
            u = offset / float(offset @ offset) - reference
            norm = float(np.linalg.norm(u))
            if norm < settings.DENOM_TOL:
                witness = {'kind': 'denominator', 'omega': i, 'time': t, 'distance': norm}
                break
            directions[i] = u / norm
        witnesses.append(witness)
        if witness is None:
            value = winding_number(directions)
            raw.append(value)
            windings.append(int(round(value)))
        else:
            raw.append(np.nan)
            windings.append(None)
    return DegreeReport(float(eps), times, windings, raw, witnesses)


# =============================================================================
# TIME REVERSAL
# =============================================================================
def _reflect(points: np.ndarray, n: int) -> np.ndarray:
    flipped = np.array(points, dtype=float, copy=True)
    flipped[..., n:] *= -1.0
    return flipped


def time_reversed(trajectory: Trajectory) -> Trajectory:
    """t -> (x(-t), -xi(-t)); a trajectory again whenever p is even in xi."""
    n = trajectory.points.shape[1] // 2
    return Trajectory(
        times=-trajectory.times[::-1],
        points=_reflect(trajectory.points[::-1], n),
        energy_drift=trajectory.energy_drift,
        integrator_stats=dict(trajectory.integrator_stats),
        status=trajectory.status,
    )


def reversal_defect(s, start: PointLike, T: float, tol: float = settings.INTEGRATOR_TOL) -> float:
    """|phi_T(x(T), -xi(T)) - (x(0), -xi(0))| for the flow phi_t of s."""
    z0 = as_phase_array(start, s.n)
    forward = integrate(s, z0, (0.0, T), tol=tol, dense=False)
    back = integrate(s, _reflect(forward.final, s.n), (0.0, T), tol=tol, dense=False)
    return float(np.linalg.norm(back.final - _reflect(z0, s.n)))


# =============================================================================
# SCATTERING
# =============================================================================
@dataclass
class ScatteringReport:
    impact_parameters: np.ndarray
    angles: np.ndarray
    trapped: int
    fraction_large: float
    max_angle: float
    threshold: float = np.pi / 3.0

    def as_rows(self) -> List[dict]:
        return [{'impact_parameter': b, 'deflection': a} for b, a in zip(self.impact_parameters, self.angles)]


def scattering_deflection(s, E0: float, impact_parameters: Sequence[float],
                          direction: Sequence[float] = (1.0, 0.0),
                          horizon: float = settings.DEFAULT_HORIZON,
                          threshold: float = np.pi / 3.0) -> ScatteringReport:
    """
    Deflection angles of trajectories sent at a single radial barrier.

    Each trajectory starts outside the support with momentum along
    `direction` and impact parameter b; trajectories still bounded at the
    horizon are counted as trapped and get a NaN angle.

    Args:
        s: Scalar symbol with n = 2 (for instance QuadraticForm with a barrier)
        E0: Energy
        impact_parameters: Offsets b perpendicular to `direction`
        direction: Incoming direction
        horizon: Integration time
        threshold: Angle counted as a large deflection

    Returns:
        ScatteringReport (fraction_large over escaped trajectories)
    """
    if s.n != 2:
        raise ValueError(f"scattering needs n = 2, got n = {s.n}")
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    normal = np.array([-d[1], d[0]])
    launch = s.support_radius + 1.0
    radius = default_escape_radius(s)
    escape = ('escape', partial(_escape_function, s, radius, 1.0), 1.0)

    angles = []
    for b in impact_parameters:
        x0 = -launch * d + b * normal
        roots = [r for r in momentum_roots(s.value, x0, d, E0, 4.0 * np.sqrt(max(E0, 1.0)), 64) if r > 0]
        if not roots:
            raise ValueError(f"no momentum on the energy shell at impact parameter {b}")
        trajectory = integrate(s, np.concatenate([x0, roots[0] * d]), (0.0, horizon),
                               events=[escape], dense=False)
        if trajectory.event != 'escape':
            angles.append(np.nan)
            continue
        xi = trajectory.final[2:]
        angles.append(float(np.arccos(np.clip(xi @ d / np.linalg.norm(xi), -1.0, 1.0))))

    angles = np.array(angles)
    escaped = angles[np.isfinite(angles)]
    fraction = float(np.mean(escaped >= threshold)) if len(escaped) else 0.0
    return ScatteringReport(
        impact_parameters=np.asarray(impact_parameters, dtype=float),
        angles=angles,
        trapped=int(np.sum(~np.isfinite(angles))),
        fraction_large=fraction,
        max_angle=float(escaped.max()) if len(escaped) else 0.0,
        threshold=threshold,
    )


# =============================================================================
# CONVEXITY OF y^2
# =============================================================================
@dataclass
class ConvexityReport:
    starts: int
    violations: int
    min_second_difference: float
    per_start: List[float]


def convexity_check(s, starts: Sequence[PointLike], t_max: float, samples: int = 1001,
                    tol: float = 1e-6, coordinate: int = 1) -> ConvexityReport:
    """
    Second finite differences of y(t)^2 along trajectories.

    Args:
        s: Scalar symbol (Quartic2D: y is x-coordinate 1)
        starts: Shell points
        t_max: Forward integration time
        samples: Uniform time samples per trajectory
        tol: Accepted negative part, scaled by max(1, max y^2)
        coordinate: Index of y in the phase vector

    Returns:
        ConvexityReport
    """
    per_start = []
    violations = 0
    for z0 in starts:
        trajectory = integrate(s, z0, (0.0, t_max))
        if trajectory.status != 'ok':
            print(f"    Excluded convexity start {np.round(as_phase_array(z0), 6).tolist()}: integrator failure")
            continue
        times = np.linspace(0.0, trajectory.times[-1], samples)
        h = times[1] - times[0]
        y2 = trajectory.at(times)[:, coordinate] ** 2
        second = (y2[2:] - 2.0 * y2[1:-1] + y2[:-2]) / h ** 2
        scale = max(1.0, float(y2.max()))
        per_start.append(float(second.min()))
        violations += int(np.sum(second < -tol * scale))
    minimum = float(min(per_start)) if per_start else np.nan
    return ConvexityReport(len(per_start), violations, minimum, per_start)


# =============================================================================
# ABSORBING WINDOW PLACEMENT
# =============================================================================
def place_potential_window(trajectory, psi: SmoothBump, strength: float = 1.0) -> AbsorptionSpec:
    """
    Absorbing disc on the x-projection of the tilted gamma_2.

    The disc is centred on the point of the trajectory inside supp psi with
    the largest |x_2| and has radius |x_2| / 2, reduced if needed so the disc
    stays inside supp psi. It therefore misses {x_2 = 0}.

    Args:
        trajectory: Trajectory or (m, 4) array of phase points
        psi: Tilt profile
        strength: Absorption strength

    Returns:
        AbsorptionSpec in 'potential_window' mode
    """
    points = trajectory.points if isinstance(trajectory, Trajectory) else np.asarray(trajectory, dtype=float)
    x = points[:, :2]
    center = np.broadcast_to(np.asarray(psi.center, dtype=float), (2,))
    inside = np.linalg.norm(x - center, axis=1) < psi.outer_radius
    if not inside.any():
        raise ValueError("trajectory never enters the support of the tilt profile")
    candidates = x[inside]
    best = candidates[int(np.argmax(np.abs(candidates[:, 1])))]
    height = abs(float(best[1]))
    if height == 0.0:
        raise ValueError("trajectory stays on {x_2 = 0} inside the tilt support")
    room = psi.outer_radius - float(np.linalg.norm(best - center))
    radius = min(0.5 * height, room)
    return AbsorptionSpec('potential_window', tuple(best), radius, strength)
