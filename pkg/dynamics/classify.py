"""
Trajectory Classification
=========================
Decides whether a phase point is trapped, escapes, or is absorbed, by
integrating forward and backward with terminal events:

- escape: |x| exceeds the escape radius while moving outward (x . d_xi p > 0)
- absorbed: the trajectory enters the absorption window
- captured: the trajectory comes within `capture_tol` of a known hyperbolic
  fixed point, i.e. it lies on that point's stable (forward) or unstable
  (backward) manifold to sampling resolution

A point captured (or never leaving) in both directions is Trapped. Longer
horizons can only turn Trapped into Escaped or Absorbed.
"""

from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from config import settings
from dynamics.fixed_points import FixedPointRecord
from dynamics.integrator import integrate
from symbols.base import PointLike, as_phase_array
from utils.numerics import unit_circle
from utils.parallel import parallel_map


class Verdict(Enum):
    TRAPPED = 'trapped'
    ESCAPED = 'escaped'
    ABSORBED = 'absorbed'
    UNDETERMINED = 'undetermined'


@dataclass
class TrapClassification:
    verdict: Verdict
    exit_time: Optional[float] = None
    hit_time: Optional[float] = None
    witness_radius: float = 0.0
    horizon: float = settings.DEFAULT_HORIZON
    energy_drift: float = 0.0
    note: str = ''


def default_escape_radius(s) -> float:
    return s.support_radius + settings.ESCAPE_RADIUS_MARGIN


def _escape_function(s, radius: float, orientation: float, z: np.ndarray) -> float:
    """Positive once |x| > radius while moving outward in the integration direction."""
    n = s.n
    x = z[:n]
    r = np.linalg.norm(x)
    velocity = s.gradient(z)[n:]
    outward = orientation * float(x @ velocity) / (r * np.linalg.norm(velocity) + 1e-300)
    return min(r - radius, outward)


def _capture_function(center: np.ndarray, tol: float, z: np.ndarray) -> float:
    return float(np.linalg.norm(z - center) - tol)


def _one_direction(s, z0: np.ndarray, span: float, escape_radius: float,
                   centers: Sequence[np.ndarray], capture_tol: float, tol: float):
    """Integrate one way; returns (outcome, time, max |x|, drift)."""
    for center in centers:
        if np.linalg.norm(z0 - center) < capture_tol:
            return 'captured', 0.0, float(np.linalg.norm(z0[:s.n])), 0.0
    if s.absorption is not None and s.absorbs(z0):
        return 'absorbed', 0.0, float(np.linalg.norm(z0[:s.n])), 0.0

    events = [('escape', partial(_escape_function, s, escape_radius, float(np.sign(span))), 1.0)]
    if s.absorption is not None:
        events.append(('absorbed', s.absorption.signed_distance, -1.0, s.absorption.radius))
    for center in centers:
        events.append(('captured', partial(_capture_function, center, capture_tol), -1.0))

    trajectory = integrate(s, z0, (0.0, span), tol=tol, events=events, dense=False)
    witness = float(np.max(np.linalg.norm(trajectory.points[:, :s.n], axis=1)))
    if trajectory.status != 'ok':
        return 'undetermined', float(trajectory.times[-1]), witness, trajectory.energy_drift
    if trajectory.event is None:
        return 'bounded', float(trajectory.times[-1]), witness, trajectory.energy_drift
    return trajectory.event, trajectory.event_time, witness, trajectory.energy_drift


def classify(s, start: PointLike, escape_radius: Optional[float] = None,
             horizon: float = settings.DEFAULT_HORIZON,
             fixed_points: Optional[Sequence[FixedPointRecord]] = None,
             capture_tol: float = settings.CAPTURE_TOL, tol: float = settings.INTEGRATOR_TOL) -> TrapClassification:
    """
    Classify a phase point by forward and backward integration.

    Args:
        s: Scalar symbol
        start: Phase point
        escape_radius: Escape radius (default: support radius + margin)
        horizon: Integration time in each direction
        fixed_points: Hyperbolic fixed points whose manifolds count as trapped
        capture_tol: Capture distance to those fixed points
        tol: Integrator tolerance

    Returns:
        TrapClassification (Absorbed if either direction meets the window)
    """
    z0 = as_phase_array(start, s.n)
    radius = default_escape_radius(s) if escape_radius is None else escape_radius
    centers = [r.z for r in (fixed_points or ()) if r.hyperbolic]

    forward = _one_direction(s, z0, horizon, radius, centers, capture_tol, tol)
    backward = _one_direction(s, z0, -horizon, radius, centers, capture_tol, tol)
    witness = max(forward[2], backward[2])
    drift = max(forward[3], backward[3])

    outcomes = {forward[0], backward[0]}
    if 'absorbed' in outcomes:
        hit = forward[1] if forward[0] == 'absorbed' else backward[1]
        return TrapClassification(Verdict.ABSORBED, hit_time=hit, witness_radius=witness,
                                  horizon=horizon, energy_drift=drift)
    if 'escape' in outcomes:
        exit_time = forward[1] if forward[0] == 'escape' else backward[1]
        return TrapClassification(Verdict.ESCAPED, exit_time=exit_time, witness_radius=witness,
                                  horizon=horizon, energy_drift=drift)
    if 'undetermined' in outcomes:
        return TrapClassification(Verdict.UNDETERMINED, witness_radius=witness, horizon=horizon,
                                  energy_drift=drift, note='integrator step failure')
    return TrapClassification(Verdict.TRAPPED, witness_radius=witness, horizon=horizon,
                              energy_drift=drift)


# =============================================================================
# ENERGY SHELL SAMPLING
# =============================================================================
@dataclass(frozen=True)
class ShellGrid:
    """x on a square grid of half-width `radius`, momenta on `directions` unit vectors."""

    x_points: int
    directions: int
    radius: float
    max_momentum: float = 4.0
    radial_scan: int = 64

    @classmethod
    def for_count(cls, count: int, radius: float, directions: int = 16, **kwargs) -> 'ShellGrid':
        """Grid with roughly `count` shell points (odd x grid so it contains 0)."""
        per_axis = int(np.ceil(np.sqrt(max(count, 1) / directions)))
        per_axis += 1 - per_axis % 2
        return cls(per_axis, directions, radius, **kwargs)


def momentum_roots(value, x: np.ndarray, direction: np.ndarray, energy: float,
                   max_momentum: float, scan: int, tol: float = settings.SHELL_TOL) -> List[float]:
    """
    All r in [0, max_momentum] with p(x, r * direction) = energy.

    A scan brackets sign changes, each refined with brentq; an exact zero
    at r = 0 is kept once.
    """
    def shifted(r):
        return value(np.concatenate([x, r * direction])) - energy

    radii = np.linspace(0.0, max_momentum, scan + 1)
    values = np.array([shifted(r) for r in radii])
    roots = []
    if abs(values[0]) <= tol:
        roots.append(0.0)
    for a, b, fa, fb in zip(radii[:-1], radii[1:], values[:-1], values[1:]):
        if fa == 0.0 and a > 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(brentq(shifted, a, b, xtol=tol)))
    return roots


def shell_points(s, energy: float, grid: ShellGrid) -> np.ndarray:
    """Deterministic points of p^{-1}(energy) on the grid, shaped (m, 2n)."""
    if s.n == 1:
        xs = [np.array([x]) for x in np.linspace(-grid.radius, grid.radius, grid.x_points)]
        directions = [np.array([1.0]), np.array([-1.0])]
    else:
        axis = np.linspace(-grid.radius, grid.radius, grid.x_points)
        xs = [np.array([a, b]) for a in axis for b in axis]
        directions = list(unit_circle(grid.directions))

    points = []
    for x in xs:
        for direction in directions:
            for r in momentum_roots(s.value, x, direction, energy, grid.max_momentum, grid.radial_scan):
                if r == 0.0 and direction is not directions[0]:
                    continue
                points.append(np.concatenate([x, r * direction]))
    return np.array(points) if points else np.zeros((0, 2 * s.n))


@dataclass
class TrappedSetSample:
    """Shell points, their classifications and the trapped subset."""

    energy: float
    points: np.ndarray
    classifications: List[TrapClassification]

    @property
    def verdicts(self) -> List[Verdict]:
        return [c.verdict for c in self.classifications]

    @property
    def trapped(self) -> np.ndarray:
        mask = np.array([v is Verdict.TRAPPED for v in self.verdicts], dtype=bool)
        return self.points[mask] if len(self.points) else self.points

    def counts(self) -> dict:
        return {v.value: sum(1 for c in self.verdicts if c is v) for v in Verdict}


def _classify_task(args):
    s, z, radius, horizon, fixed_points = args
    return classify(s, z, radius, horizon, fixed_points)


def sample_trapped_set(s, E0: float, grid: ShellGrid,
                       fixed_points: Optional[Sequence[FixedPointRecord]] = None,
                       horizon: float = settings.DEFAULT_HORIZON,
                       escape_radius: Optional[float] = None,
                       extra_points: Optional[np.ndarray] = None,
                       workers: Optional[int] = None) -> TrappedSetSample:
    """
    Sample the energy shell and classify every point.

    Args:
        s: Scalar symbol
        E0: Energy
        grid: ShellGrid
        fixed_points: Hyperbolic fixed points (trapped-to-resolution rule)
        horizon: Classification horizon
        escape_radius: Escape radius (default: support radius + margin)
        extra_points: Additional shell points appended to the grid sample
        workers: Process count

    Returns:
        TrappedSetSample
    """
    points = shell_points(s, E0, grid)
    if extra_points is not None and len(extra_points):
        points = np.vstack([points, np.asarray(extra_points, dtype=float)])
    radius = default_escape_radius(s) if escape_radius is None else escape_radius
    fixed = list(fixed_points or ())
    tasks = [(s, z, radius, horizon, fixed) for z in points]
    classifications = parallel_map(_classify_task, tasks, workers, description='Classifying shell')
    return TrappedSetSample(E0, points, classifications)


def distance_to_set(points: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to a sampled reference set."""
    if len(points) == 0:
        return np.zeros(0)
    if len(reference) == 0:
        return np.full(len(points), np.inf)
    distances, _ = cKDTree(np.atleast_2d(reference)).query(np.atleast_2d(points))
    return np.asarray(distances, dtype=float)
