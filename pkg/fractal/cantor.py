"""
Cantor Sets and Zero-Set Functions
==================================
This module handles:
- Constant-ratio Cantor sets K of prescribed dimension inside [-1/2, 1/2]
- The function g >= 0 whose zero set in [-1, 1] is K (to a resolution)
- Its weighted antiderivative G(t) = int_0^t s g(s)^2 ds by cached panels

Each construction level replaces an interval of length L by its two end
pieces of length r L, so after `depth` levels K has 2^depth intervals and
dimension log 2 / log(1/r). With r = 2^(-1/d) the dimension is d.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad

from config import settings
from symbols.bumps import SmoothBump

ArrayLike = Union[float, np.ndarray]

BASE_INTERVAL = (-0.25, 0.25)


@dataclass(frozen=True, eq=False)
class CantorSpec:
    """Realized Cantor set: sorted closed intervals at the requested depth."""

    target_dim: float
    depth: int
    ratio_schedule: Tuple[float, ...]
    intervals: np.ndarray
    offset: float = 0.0

    @property
    def ratio(self) -> float:
        return float(self.ratio_schedule[0])

    @property
    def realized_points(self) -> np.ndarray:
        """Interval endpoints at depth, ascending."""
        return np.sort(self.intervals.ravel())

    @property
    def lefts(self) -> np.ndarray:
        return self.intervals[:, 0]

    @property
    def rights(self) -> np.ndarray:
        return self.intervals[:, 1]

    @property
    def hull(self) -> Tuple[float, float]:
        return float(self.lefts[0]), float(self.rights[-1])

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.realized_points, -self.realized_points[::-1], atol=1e-15))

    def distance(self, s: ArrayLike) -> ArrayLike:
        """Distance from s to K (0 inside an interval)."""
        s_arr = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s_arr).ravel()
        lefts, rights = self.lefts, self.rights
        idx = np.searchsorted(lefts, flat, side='right') - 1

        below = idx < 0
        idx_c = np.clip(idx, 0, len(lefts) - 1)
        nxt = np.clip(idx + 1, 0, len(lefts) - 1)

        to_right_end = flat - rights[idx_c]
        to_next_left = np.where(idx + 1 < len(lefts), lefts[nxt] - flat, np.inf)
        out = np.where(to_right_end <= 0.0, 0.0, np.minimum(to_right_end, to_next_left))
        out = np.where(below, lefts[0] - flat, out)

        out = out.reshape(s_arr.shape)
        return out if np.ndim(out) else float(out)

    def as_dict(self) -> dict:
        lo, hi = self.hull
        return {
            'target_dim': self.target_dim,
            'depth': self.depth,
            'ratio': self.ratio,
            'intervals': int(len(self.intervals)),
            'offset': self.offset,
            'hull_low': lo,
            'hull_high': hi,
        }


def cantor_build(target_dim: float, depth: int, translate: bool = True) -> CantorSpec:
    """
    Build the constant-ratio Cantor set of dimension target_dim.

    The set is constructed symmetric in [-1/4, 1/4]. With `translate` it is
    then shifted so the interval right of the central gap starts at 0, which
    puts 0 in K and K inside [-1/2, 1/2].

    Args:
        target_dim: Dimension in (0, 1); see point_set for dimension 0
        depth: Construction levels (>= 1)
        translate: Shift so 0 belongs to K

    Returns:
        CantorSpec with 2^depth intervals
    """
    if not 0.0 < target_dim < 1.0:
        raise ValueError(f"target_dim must lie in (0, 1), got {target_dim}")
    if int(depth) != depth or depth < 1:
        raise ValueError(f"depth must be an integer >= 1, got {depth}")
    depth = int(depth)
    r = 2.0 ** (-1.0 / target_dim)
    schedule = (r,) * depth

    lefts = np.array([BASE_INTERVAL[0]])
    rights = np.array([BASE_INTERVAL[1]])
    for ratio in schedule:
        piece = ratio * (rights - lefts)
        lefts, rights = (np.concatenate([lefts, rights - piece]),
                         np.concatenate([lefts + piece, rights]))
        order = np.argsort(lefts, kind='stable')
        lefts, rights = lefts[order], rights[order]

    offset = 0.0
    if translate:
        offset = -float(lefts[lefts >= 0.0].min())
        lefts, rights = lefts + offset, rights + offset

    return CantorSpec(target_dim=float(target_dim), depth=depth, ratio_schedule=schedule,
                      intervals=np.column_stack([lefts, rights]), offset=offset)


def point_set(depth: int = 1) -> CantorSpec:
    """The single point {0} as a CantorSpec: the fiber of the D = 1 sheet."""
    if int(depth) != depth or depth < 1:
        raise ValueError(f"depth must be an integer >= 1, got {depth}")
    return CantorSpec(target_dim=0.0, depth=int(depth), ratio_schedule=(0.0,) * int(depth),
                      intervals=np.zeros((1, 2)), offset=0.0)


# =============================================================================
# ZERO-SET FUNCTION
# =============================================================================

@dataclass(eq=False)
class ZeroSetFunction:
    """
    g(s) = h(dist(s, K) - res/2) * envelope(s) with h(u) = u^3 / (u + res/2).

    h is C^2, vanishes for u <= 0 and grows like u^2, so g is zero exactly
    within res/2 of K and positive elsewhere inside the envelope support.
    """

    K: CantorSpec
    res: float
    envelope: SmoothBump = field(default_factory=lambda: SmoothBump(1.0, 1.5))
    panels: int = 64

    def __post_init__(self):
        if not self.res > 0:
            raise ValueError(f"res must be positive, got {self.res}")
        if self.panels < 2 or self.panels % 2:
            raise ValueError(f"panels must be an even integer >= 2, got {self.panels}")

    @property
    def half_res(self) -> float:
        return 0.5 * self.res

    @property
    def support(self) -> float:
        return float(self.envelope.outer_radius)

    def _h(self, u: np.ndarray) -> np.ndarray:
        c = self.half_res
        pos = np.maximum(u, 0.0)
        return pos ** 3 / (pos + c)

    def _h_prime(self, u: np.ndarray) -> np.ndarray:
        c = self.half_res
        pos = np.maximum(u, 0.0)
        return pos ** 2 * (2.0 * pos + 3.0 * c) / (pos + c) ** 2

    def _dist_sign(self, s: np.ndarray) -> np.ndarray:
        """d/ds of dist(s, K) away from K: -1 left of the nearest point, +1 right."""
        step = 1e-3 * self.res
        return np.sign(np.asarray(self.K.distance(s + step)) - np.asarray(self.K.distance(s - step)))

    def g(self, s: ArrayLike) -> ArrayLike:
        s_arr = np.asarray(s, dtype=float)
        u = np.asarray(self.K.distance(s_arr)) - self.half_res
        out = self._h(u) * self.envelope.profile(np.abs(s_arr))
        return out if np.ndim(out) else float(out)

    def g_derivative(self, s: ArrayLike) -> ArrayLike:
        s_arr = np.asarray(s, dtype=float)
        u = np.asarray(self.K.distance(s_arr)) - self.half_res
        env = self.envelope.profile(np.abs(s_arr))
        env_d = self.envelope.profile_derivative(np.abs(s_arr)) * np.sign(s_arr)
        out = self._h_prime(u) * self._dist_sign(s_arr) * env + self._h(u) * env_d
        return out if np.ndim(out) else float(out)

    def __call__(self, s: ArrayLike) -> ArrayLike:
        return self.g(s)

    # -------------------------------------------------------------------------
    # G(t) = int_0^t s g(s)^2 ds
    # -------------------------------------------------------------------------
    def _integrand(self, s: float) -> float:
        return s * self.g(s) ** 2

    def _quad(self, a: float, b: float) -> float:
        if a == b:
            return 0.0
        value, _ = quad(self._integrand, a, b, epsabs=settings.QUAD_TOL, epsrel=settings.QUAD_TOL,
                        limit=200)
        return float(value)

    @cached_property
    def _panel_table(self) -> Tuple[np.ndarray, np.ndarray]:
        """Panel edges over the envelope support and G at every edge."""
        edges = np.linspace(-self.support, self.support, self.panels + 1)
        pieces = np.array([self._quad(a, b) for a, b in zip(edges[:-1], edges[1:])])
        cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
        zero = self.panels // 2
        return edges, cumulative - cumulative[zero]

    def G(self, t: ArrayLike) -> ArrayLike:
        edges, at_edges = self._panel_table
        t_arr = np.asarray(t, dtype=float)
        flat = np.clip(np.atleast_1d(t_arr).ravel(), edges[0], edges[-1])
        idx = np.clip(np.searchsorted(edges, flat, side='right') - 1, 0, self.panels - 1)
        # Panels with both ends on the same side of 0, so start from the edge nearer 0
        zero = self.panels // 2
        start = np.where(idx >= zero, idx, idx + 1)
        out = np.array([at_edges[k] + self._quad(edges[k], x) for k, x in zip(start, flat)])
        out = out.reshape(t_arr.shape)
        return out if np.ndim(out) else float(out)

    def G_prime(self, t: ArrayLike) -> ArrayLike:
        t_arr = np.asarray(t, dtype=float)
        out = t_arr * np.asarray(self.g(t_arr)) ** 2
        return out if np.ndim(out) else float(out)

    def G_second(self, t: ArrayLike) -> ArrayLike:
        t_arr = np.asarray(t, dtype=float)
        g = np.asarray(self.g(t_arr))
        out = g ** 2 + 2.0 * t_arr * g * np.asarray(self.g_derivative(t_arr))
        return out if np.ndim(out) else float(out)

    def hausdorff_to_K(self, zeros: np.ndarray, scale: float = 1.0) -> float:
        """
        Two-sided Hausdorff distance between scale*K and a set of zeros.

        Endpoints of K stand in for K; at depth they are finer than res.
        """
        zeros = np.sort(np.asarray(zeros, dtype=float).ravel())
        if zeros.size == 0:
            return np.inf
        to_K = float(np.max(scale * np.asarray(self.K.distance(zeros / scale))))
        points = scale * self.K.realized_points
        idx = np.clip(np.searchsorted(zeros, points), 1, zeros.size - 1)
        nearest = np.minimum(np.abs(points - zeros[idx - 1]), np.abs(points - zeros[idx]))
        return max(to_K, float(nearest.max()))


def zero_set_function(K: CantorSpec, res: float, envelope: Optional[SmoothBump] = None) -> ZeroSetFunction:
    """g and G for K at resolution res (in the unscaled variable)."""
    if envelope is None:
        return ZeroSetFunction(K=K, res=res)
    return ZeroSetFunction(K=K, res=res, envelope=envelope)
