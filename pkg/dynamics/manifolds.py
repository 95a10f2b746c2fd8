"""
Stable and Unstable Manifold Charts
===================================
Samples the outgoing (unstable) or incoming (stable) Lagrangian manifold of
a hyperbolic fixed point over a line patch in x-space, together with its
generating function.

A ring of launches on the local eigenplane is flowed (forward for outgoing,
backward for incoming) until the x-projection crosses the patch. On the
local linear piece the manifold is the graph of
phi = xi_j . dx + 1/2 dx . dxi, so phi(x_j) = 0; along the flow phi grows by
the integral of xi . dx. A sign change in the patch coordinate along a run of
consecutive launches is a fold of the projection.
"""

from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional

import numpy as np
from scipy.integrate import quad

from config import settings
from dynamics.classify import _escape_function, default_escape_radius
from dynamics.fixed_points import FixedPointRecord
from dynamics.heteroclinic import launch_direction
from dynamics.integrator import integrate

OUTGOING = 'outgoing'
INCOMING = 'incoming'


class FoldDetected(Exception):
    """The manifold does not project nicely on x-space over the requested patch."""

    def __init__(self, location: np.ndarray, theta: float):
        self.location = np.asarray(location, dtype=float)
        self.theta = float(theta)
        super().__init__(
            f"fold of the x-projection near x = {np.round(self.location, 6).tolist()} (launch angle {theta:.6f})"
        )


@dataclass(frozen=True)
class AxisPatch:
    """The segment {x[axis] = level, |x[other] - center| <= half_width} (a point when n = 1)."""

    axis: int = 0
    level: float = 0.0
    center: float = 0.0
    half_width: float = 0.5

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError(f"patch half_width must be positive, got {self.half_width}")


@dataclass
class ChartRequest:
    """What to chart: symbol, base fixed point and orientation."""

    symbol: object
    base: FixedPointRecord
    sign: str = OUTGOING
    ring_radius: float = settings.LAUNCH_OFFSET
    ring_count: int = 720
    horizon: float = settings.SHOOTING_HORIZON

    def __post_init__(self):
        if self.sign not in (OUTGOING, INCOMING):
            raise ValueError(f"sign must be '{OUTGOING}' or '{INCOMING}', got {self.sign!r}")
        if not self.base.hyperbolic:
            raise ValueError("manifold charts need a hyperbolic base point")


@dataclass
class ManifoldChart:
    """Generating-function samples phi(x) with gradients xi = grad phi(x) over a patch."""

    base: FixedPointRecord
    sign: str
    patch: AxisPatch
    points: np.ndarray
    phi: np.ndarray
    thetas: np.ndarray
    shell_residual: float
    energy: float = 0.0
    launches: int = field(default=0, repr=False)

    @property
    def n(self) -> int:
        return self.points.shape[1] // 2 if len(self.points) else self.base.location.n

    @property
    def transverse(self) -> np.ndarray:
        """Coordinate along the patch (the non-fixed x coordinate)."""
        if self.n == 1:
            return np.zeros(len(self.points))
        return self.points[:, 1 - self.patch.axis]

    def gradient(self, coordinate: float) -> np.ndarray:
        """grad phi at a patch coordinate, interpolated between samples."""
        t = self.transverse
        order = np.argsort(t)
        return np.array([np.interp(coordinate, t[order], self.points[order, self.n + k])
                         for k in range(self.n)])

    def value(self, coordinate: float) -> float:
        t = self.transverse
        order = np.argsort(t)
        return float(np.interp(coordinate, t[order], self.phi[order]))

    def as_rows(self) -> List[dict]:
        rows = []
        for z, phi, theta in zip(self.points, self.phi, self.thetas):
            row = {f"x{i + 1}": z[i] for i in range(self.n)}
            row.update({f"xi{i + 1}": z[self.n + i] for i in range(self.n)})
            row.update({'phi': phi, 'theta': theta, 'sign': self.sign})
            rows.append(row)
        return rows


def _linear_phi(base: np.ndarray, z: np.ndarray, n: int) -> float:
    dx = z[:n] - base[:n]
    dxi = z[n:] - base[n:]
    return float(base[n:] @ dx + 0.5 * dx @ dxi)


def _action_integral(s, trajectory, t_end: float) -> float:
    """Integral of xi . dx/dt along the dense output from 0 to t_end (signed)."""
    n = s.n

    def integrand(t):
        z = trajectory.at(t)
        return float(z[n:] @ s.gradient(z)[n:])

    value, _ = quad(integrand, 0.0, t_end, epsabs=settings.QUAD_TOL, epsrel=settings.QUAD_TOL, limit=200)
    return value


def _check_folds(thetas: np.ndarray, hit: np.ndarray, coordinate: np.ndarray, locations: np.ndarray):
    """Raise FoldDetected where the patch coordinate turns back along a run of hits."""
    count = len(thetas)
    if hit.all() or not hit.any():
        start = 0
    else:
        start = int(np.argmin(hit))
    order = [(start + k) % count for k in range(count)]
    run: List[int] = []
    for index in order + [None]:
        if index is not None and hit[index]:
            run.append(index)
            continue
        if len(run) >= 3:
            steps = np.diff(coordinate[run])
            steps = steps[np.abs(steps) > 0]
            turns = np.nonzero(np.sign(steps[1:]) != np.sign(steps[:-1]))[0]
            if len(turns):
                where = run[turns[0] + 1]
                raise FoldDetected(locations[where], thetas[where])
        run = []


def generating_function(chart_spec: ChartRequest, axis_patch: AxisPatch) -> ManifoldChart:
    """
    Chart the outgoing or incoming manifold of `chart_spec.base` over a patch.

    Args:
        chart_spec: ChartRequest (symbol, base record, sign, ring size, horizon)
        axis_patch: AxisPatch the manifold should project onto

    Returns:
        ManifoldChart with phi, grad phi and the shell residual of its samples

    Raises:
        FoldDetected: The projection onto x-space is singular over the patch
    """
    s, base = chart_spec.symbol, chart_spec.base
    n = s.n
    z_base = base.z
    outgoing = chart_spec.sign == OUTGOING
    basis = base.unstable_basis() if outgoing else base.stable_basis()
    if basis.shape[1] != n:
        raise ValueError(f"base point has a {basis.shape[1]}-dimensional {chart_spec.sign} subspace, need {n}")

    if n == 1:
        thetas = np.array([0.0, np.pi])
    else:
        thetas = 2.0 * np.pi * np.arange(chart_spec.ring_count) / chart_spec.ring_count
    span = chart_spec.horizon if outgoing else -chart_spec.horizon
    side = np.sign(axis_patch.level - z_base[axis_patch.axis]) or 1.0

    def crossing(z):
        return side * (z[axis_patch.axis] - axis_patch.level)

    escape = ('escape', partial(_escape_function, s, default_escape_radius(s), float(np.sign(span))), 1.0)

    hit = np.zeros(len(thetas), dtype=bool)
    coordinate = np.full(len(thetas), np.nan)
    locations = np.zeros((len(thetas), n))
    states = np.zeros((len(thetas), 2 * n))
    phis = np.zeros(len(thetas))

    for k, theta in enumerate(thetas):
        start = z_base + chart_spec.ring_radius * launch_direction(basis, theta)
        trajectory = integrate(s, start, (0.0, span), events=[('patch', crossing, 1.0), escape])
        if trajectory.event != 'patch':
            continue
        end = trajectory.at(trajectory.event_time)
        locations[k] = end[:n]
        coordinate[k] = 0.0 if n == 1 else end[1 - axis_patch.axis]
        if n > 1 and abs(coordinate[k] - axis_patch.center) > axis_patch.half_width:
            continue
        hit[k] = True
        states[k] = end
        phis[k] = _linear_phi(z_base, start, n) + _action_integral(s, trajectory, trajectory.event_time)

    if n > 1:
        _check_folds(thetas, hit, coordinate, locations)

    points = states[hit]
    residual = float(np.max(np.abs([s.value(z) - base.energy for z in points]))) if len(points) else 0.0
    return ManifoldChart(
        base=base,
        sign=chart_spec.sign,
        patch=axis_patch,
        points=points,
        phi=phis[hit],
        thetas=thetas[hit],
        shell_residual=residual,
        energy=base.energy,
        launches=len(thetas),
    )


def manifold_mismatch(outgoing: ManifoldChart, incoming: ManifoldChart,
                      coordinates: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Difference of the patch derivatives d phi_out - d phi_in along the patch.

    Zeros mark points of the patch lying on a heteroclinic trajectory.
    """
    if outgoing.n == 1:
        return np.array([outgoing.points[0, 1] - incoming.points[0, 1]]) if len(outgoing.points) else np.zeros(0)
    k = 1 - outgoing.patch.axis
    if coordinates is None:
        lo = max(outgoing.transverse.min(), incoming.transverse.min())
        hi = min(outgoing.transverse.max(), incoming.transverse.max())
        coordinates = np.linspace(lo, hi, 201)
    return np.array([outgoing.gradient(c)[k] - incoming.gradient(c)[k] for c in coordinates])
