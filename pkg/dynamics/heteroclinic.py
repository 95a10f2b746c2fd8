"""
Heteroclinic Shooting
=====================
Finds trajectories leaving one hyperbolic fixed point and arriving at
another by shooting along the unstable subspace of the first.

Launch directions are cos(theta) v_1 + sin(theta) v_2 for an orthonormal
unstable basis (v_1, v_2) (just +-v_1 when the unstable subspace is a
line). Every angle of an even grid over [0, 2 pi) is integrated, the
closest approach to the target is read from the dense output, and each
local minimum is refined by bounded scalar minimization over theta.
"""

from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from config import settings
from dynamics.classify import default_escape_radius, _escape_function
from dynamics.fixed_points import FixedPointRecord
from dynamics.integrator import Trajectory, integrate


@dataclass
class HeteroclinicCapture:
    """A shot whose closest approach to the target is below the capture radius."""

    theta: float
    launch: np.ndarray
    closest_distance: float
    closest_time: float
    trajectory: Trajectory = field(repr=False)

    def points(self, count: int = 2000) -> np.ndarray:
        """Dense samples up to the closest approach."""
        states = self.trajectory.resample(count)
        times = np.union1d(np.linspace(self.trajectory.times[0], self.trajectory.times[-1], count),
                           self.trajectory.times)
        return states[times <= self.closest_time + 1e-12]

    def as_row(self) -> dict:
        return {
            'theta': self.theta,
            'closest_distance': self.closest_distance,
            'closest_time': self.closest_time,
            'energy_drift': self.trajectory.energy_drift,
        }


def launch_direction(basis: np.ndarray, theta: float) -> np.ndarray:
    """cos(theta) v_1 + sin(theta) v_2, or sign(cos(theta)) v_1 for a 1-D subspace."""
    if basis.shape[1] == 1:
        return basis[:, 0] * (1.0 if np.cos(theta) >= 0 else -1.0)
    return np.cos(theta) * basis[:, 0] + np.sin(theta) * basis[:, 1]


def _shoot(s, source: FixedPointRecord, target: np.ndarray, basis: np.ndarray, theta: float,
           horizon: float, offset: float, escape_radius: float, exclude_absorbed: bool,
           tol: float) -> Tuple[float, float, Trajectory, bool]:
    """One shot: (closest distance, time of closest approach, trajectory, absorbed)."""
    start = source.z + offset * launch_direction(basis, theta)
    events = [('escape', partial(_escape_function, s, escape_radius, 1.0), 1.0)]
    if exclude_absorbed and s.absorption is not None:
        events.append(('absorbed', s.absorption.signed_distance, -1.0, s.absorption.radius))
    trajectory = integrate(s, start, (0.0, horizon), tol=tol, events=events)

    times = np.union1d(np.linspace(trajectory.times[0], trajectory.times[-1], 4000), trajectory.times)
    states = trajectory.at(times) if trajectory.dense is not None else trajectory.points
    if trajectory.dense is None:
        times = trajectory.times
    distances = np.linalg.norm(states - target, axis=1)
    index = int(np.argmin(distances))
    absorbed = trajectory.event == 'absorbed'
    return float(distances[index]), float(times[index]), trajectory, absorbed


def heteroclinic_shoot(s, source: FixedPointRecord, target: FixedPointRecord,
                       cone: Optional[Tuple[float, float]] = None,
                       capture_radius: float = settings.CAPTURE_RADIUS,
                       horizon: float = settings.SHOOTING_HORIZON,
                       angles: int = settings.SHOOTING_ANGLES,
                       offset: float = settings.LAUNCH_OFFSET,
                       exclude_absorbed: bool = True,
                       escape_radius: Optional[float] = None,
                       tol: float = settings.INTEGRATOR_TOL) -> List[HeteroclinicCapture]:
    """
    Shoot from `source` along its unstable subspace towards `target`.

    Args:
        s: Scalar symbol
        source: Departure fixed point
        target: Arrival fixed point
        cone: Optional (theta_min, theta_max) restricting launch angles
        capture_radius: Closest approach accepted as a capture
        horizon: Integration time per shot
        angles: Even number of grid angles over [0, 2 pi)
        offset: Launch distance from the source
        exclude_absorbed: Drop shots that meet the absorption window
        escape_radius: Escape radius (default: support radius + margin)
        tol: Integrator tolerance

    Returns:
        Captures sorted by closest distance; empty when nothing arrives
    """
    basis = source.unstable_basis()
    if basis.shape[1] == 0:
        raise ValueError("source fixed point has no unstable directions")
    if angles % 2:
        angles += 1
    radius = default_escape_radius(s) if escape_radius is None else escape_radius
    goal = target.z

    if basis.shape[1] == 1:
        thetas = np.array([0.0, np.pi])
    else:
        thetas = 2.0 * np.pi * np.arange(angles) / angles
    if cone is not None:
        thetas = thetas[(thetas >= cone[0]) & (thetas <= cone[1])]

    shoot = partial(_shoot, s, source, goal, basis, horizon=horizon, offset=offset,
                    escape_radius=radius, exclude_absorbed=exclude_absorbed, tol=tol)
    shots = [shoot(theta) for theta in thetas]
    distances = np.array([d if not absorbed else np.inf for d, _, _, absorbed in shots])

    captures: List[HeteroclinicCapture] = []
    step = 2.0 * np.pi / max(angles, 2)
    # minima farther than this from the target are not refined
    refine_radius = 0.25 * float(np.linalg.norm(goal - source.z))
    for i, theta in enumerate(thetas):
        neighbours = [distances[(i - 1) % len(thetas)], distances[(i + 1) % len(thetas)]]
        if not np.isfinite(distances[i]) or distances[i] > min(neighbours) \
                or distances[i] > refine_radius:
            continue
        best_theta, (best_d, best_t, best_traj, _) = theta, shots[i]
        if basis.shape[1] > 1 and best_d > 0.0:
            result = minimize_scalar(
                lambda th: _shot_cost(shoot(th), 10.0 * refine_radius),
                bounds=(theta - step, theta + step), method='bounded',
                options={'xatol': 1e-10},
            )
            if result.fun < best_d:
                best_theta = float(result.x)
                best_d, best_t, best_traj, _ = shoot(best_theta)
        if best_d < capture_radius:
            if any(abs(np.angle(np.exp(1j * (c.theta - best_theta)))) < 1e-6 for c in captures):
                continue
            captures.append(HeteroclinicCapture(
                theta=float(best_theta % (2.0 * np.pi)),
                launch=source.z + offset * launch_direction(basis, best_theta),
                closest_distance=best_d,
                closest_time=best_t,
                trajectory=best_traj,
            ))
    return sorted(captures, key=lambda c: c.closest_distance)


def _shot_cost(shot, penalty: float) -> float:
    """Closest distance; absorbed shots cost `penalty`."""
    distance, _, _, absorbed = shot
    return penalty if absorbed else distance
