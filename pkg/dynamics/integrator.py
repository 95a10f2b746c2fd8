"""
Hamiltonian Flow Integration
============================
Integrates dz/dt = H_p(z) with scipy's DOP853 (order 8, embedded 5/3 error
estimate) and dense output.

Negative spans integrate backward. A failed step (step size underflow)
leaves an 'undetermined' trajectory that still carries every accepted
state; non-finite states truncate the trajectory at the last good one.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from config import settings
from symbols.base import PointLike, as_phase_array

# DOP853 evaluates the field 12 times per attempted step, 3 more per dense step
_STAGES_PER_STEP = 12
_DENSE_EXTRA = 3


@dataclass
class Trajectory:
    """Integrated flow line: times strictly monotone, points shaped (m, 2n)."""

    times: np.ndarray
    points: np.ndarray
    energy_drift: float
    integrator_stats: dict
    status: str = 'ok'
    event: Optional[str] = None
    event_time: Optional[float] = None
    dense: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def at(self, t) -> np.ndarray:
        """State at time(s) t from the dense output (points shaped (..., 2n))."""
        if self.dense is None:
            raise ValueError("trajectory was integrated without dense output")
        return np.asarray(self.dense(t)).T

    def resample(self, count: int = 2000) -> np.ndarray:
        """`count` states at evenly spaced times, plus every accepted step."""
        if self.dense is None or len(self.times) < 2:
            return self.points
        grid = np.linspace(self.times[0], self.times[-1], count)
        grid = np.union1d(grid, self.times)
        return self.at(grid)


def _make_event(func: Callable, name: str, direction: float):
    def event(t, z):
        return func(z)
    event.terminal = True
    event.direction = direction
    event.__name__ = name
    return event


def _crosses(before: float, after: float, direction: float) -> bool:
    if direction < 0:
        return before > 0.0 >= after
    if direction > 0:
        return before < 0.0 <= after
    return np.sign(before) != np.sign(after)


def _scan_between_steps(s, sol, times: np.ndarray, points: np.ndarray, scans, stop: int):
    """
    Earliest crossing of a scanned event inside an accepted step.

    solve_ivp only compares event signs at step ends, so a window narrower
    than one step can be jumped over. Each step up to index `stop` is
    subdivided so consecutive samples lie at most a quarter of the event
    length scale apart along the path.

    Returns:
        (name, time) of the first crossing, or None
    """
    for k in range(stop):
        ta, tb = times[k], times[k + 1]
        speed = max(np.linalg.norm(s.field(points[k])), np.linalg.norm(s.field(points[k + 1])))
        length = max(np.linalg.norm(points[k + 1] - points[k]), speed * abs(tb - ta))
        best = None
        for name, func, direction, scale in scans:
            pieces = int(np.ceil(length / (0.25 * scale)))
            if pieces < 2:
                continue
            grid = np.linspace(ta, tb, pieces + 1)
            values = [func(sol(t)) for t in grid]
            for j in range(pieces):
                if _crosses(values[j], values[j + 1], direction):
                    hit = brentq(lambda t: func(sol(t)), grid[j], grid[j + 1], xtol=1e-14)
                    if best is None or abs(hit - ta) < abs(best[1] - ta):
                        best = (name, float(hit))
                    break
        if best is not None:
            return best
    return None


def integrate(s, start: PointLike, t_span: Tuple[float, float], tol: float = settings.INTEGRATOR_TOL,
              events: Optional[Sequence[tuple]] = None,
              max_step: float = np.inf, dense: bool = True) -> Trajectory:
    """
    Integrate the Hamiltonian flow of a scalar symbol.

    Args:
        s: Scalar SymbolModel
        start: Initial phase point
        t_span: (t0, t1); t1 < t0 integrates backward
        tol: Relative tolerance (absolute tolerance is tol * ATOL_FACTOR)
        events: Terminal events as (name, g(z), direction) or
            (name, g(z), direction, length); the flow stops when g crosses
            zero in the given direction. With a length scale the event is
            also searched inside each accepted step
        max_step: Largest allowed step
        dense: Keep the dense-output interpolant

    Returns:
        Trajectory
    """
    z0 = as_phase_array(start, s.n)
    t0, t1 = float(t_span[0]), float(t_span[1])
    p0 = s.value(z0)

    def rhs(t, z):
        return s.field(z)

    names: List[str] = []
    ivp_events = []
    scans = []
    for name, func, direction, *scale in (events or ()):
        names.append(name)
        ivp_events.append(_make_event(func, name, direction))
        if scale and scale[0]:
            scans.append((name, func, direction, float(scale[0])))

    if t1 == t0:
        stats = {'nfev': 0, 'accepted_steps': 0, 'rejected_steps': 0, 'message': 'empty span'}
        return Trajectory(np.array([t0]), z0[None, :], 0.0, stats, 'ok')

    solution = solve_ivp(
        rhs, (t0, t1), z0,
        method=settings.INTEGRATOR_METHOD,
        rtol=tol,
        atol=tol * settings.ATOL_FACTOR,
        dense_output=dense or bool(scans),
        events=ivp_events or None,
        max_step=max_step,
    )

    times = solution.t
    points = solution.y.T
    finite = np.all(np.isfinite(points), axis=1)
    status = 'ok'
    if not finite.all():
        last_good = int(np.argmin(finite)) - 1
        times, points = times[:max(last_good, 0) + 1], points[:max(last_good, 0) + 1]
        status = 'nonfinite'
    elif solution.status == -1:
        status = 'undetermined'

    event_name, event_time = None, None
    if solution.status == 1 and ivp_events:
        for name, hits in zip(names, solution.t_events):
            if len(hits):
                event_name, event_time = name, float(hits[0])
                break

    if scans and status == 'ok' and len(times) > 1:
        hit = _scan_between_steps(s, solution.sol, times, points, scans, len(times) - 1)
        if hit is not None and (event_time is None or abs(hit[1] - t0) < abs(event_time - t0)):
            event_name, event_time = hit
            keep = (times - event_time) * np.sign(t1 - t0) < 0
            times = np.append(times[keep], event_time)
            points = np.vstack([points[keep], solution.sol(event_time)])

    accepted = max(len(solution.t) - 1, 0)
    per_step = _STAGES_PER_STEP + (_DENSE_EXTRA if dense or scans else 0)
    stats = {
        'nfev': int(solution.nfev),
        'accepted_steps': accepted,
        'rejected_steps': max(0, (int(solution.nfev) - 1 - per_step * accepted) // _STAGES_PER_STEP),
        'message': str(solution.message),
    }

    energies = np.array([s.value(z) for z in points])
    drift = float(np.max(np.abs(energies - p0)) / max(1.0, abs(p0))) if len(points) else 0.0

    return Trajectory(
        times=times,
        points=points,
        energy_drift=drift,
        integrator_stats=stats,
        status=status,
        event=event_name,
        event_time=event_time,
        dense=solution.sol if dense and status != 'nonfinite' else None,
    )


def energy_drift_along(s, trajectory: Trajectory, samples: int = 500) -> float:
    """Relative energy drift evaluated on the dense output, not only at steps."""
    states = trajectory.resample(samples)
    energies = np.array([s.value(z) for z in states])
    return float(np.max(np.abs(energies - energies[0])) / max(1.0, abs(energies[0])))
