"""
Box-Counting Dimension
======================
Counts occupied boxes of a fixed lattice over a dyadic ladder of box sizes
and fits log N against log(1/scale). The two largest and two smallest
scales are left out of the fit (lattice saturation at the top, sampling
noise at the bottom) but stay in the report.
"""

from dataclasses import dataclass
from functools import partial
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config import settings
from utils.parallel import parallel_map


@dataclass
class DimensionReport:
    """Box counts per scale and the fitted slope with its confidence band."""

    scales: np.ndarray
    counts: np.ndarray
    fitted_dim: float
    ci: Tuple[float, float]
    window: Tuple[float, float]
    stderr: float = 0.0
    points: int = 0
    ambient: int = 1

    @property
    def fit_mask(self) -> np.ndarray:
        lo, hi = self.window
        return (self.scales >= lo) & (self.scales <= hi)

    def fitted_line(self) -> np.ndarray:
        """log N predicted on the fit window (intercept through the window mean)."""
        mask = self.fit_mask
        x = np.log(1.0 / self.scales[mask])
        y = np.log(self.counts[mask])
        return y.mean() + self.fitted_dim * (x - x.mean())

    def as_rows(self) -> list:
        mask = self.fit_mask
        return [{'scale': float(s), 'count': int(c), 'in_window': bool(m)}
                for s, c, m in zip(self.scales, self.counts, mask)]

    def as_dict(self) -> dict:
        return {
            'fitted_dim': self.fitted_dim,
            'ci_low': self.ci[0],
            'ci_high': self.ci[1],
            'stderr': self.stderr,
            'window_low': self.window[0],
            'window_high': self.window[1],
            'points': self.points,
            'ambient': self.ambient,
            'scales': [float(s) for s in self.scales],
            'counts': [int(c) for c in self.counts],
        }


def scale_ladder(cloud: np.ndarray, count: int = 12, finest: Optional[float] = None,
                 snap: bool = False) -> np.ndarray:
    """
    Decreasing dyadic box sizes starting at half the cloud extent.

    With `finest`, the ladder runs from half the extent down to `finest` in
    `count` geometric steps instead of halving. With `snap`, every size is
    moved to the nearest extent / m for an integer m, so the lattice tiles
    the cloud's bounding box exactly (repeated sizes are merged).
    """
    cloud = np.atleast_2d(cloud)
    extent = float(np.max(cloud.max(axis=0) - cloud.min(axis=0)))
    if extent == 0.0:
        return np.array([1.0])
    top = 0.5 * extent
    if finest is None:
        return top * 0.5 ** np.arange(count)
    if not 0 < finest < top:
        raise ValueError(f"finest scale must lie in (0, {top:.6g}), got {finest}")
    scales = np.geomspace(top, finest, count)
    if snap:
        divisors = np.unique(np.maximum(np.round(extent / scales), 2.0))
        scales = extent / divisors
    return scales


def _count_boxes(scale: float, cloud: np.ndarray, origin: np.ndarray, span: np.ndarray) -> int:
    # closed boxes: points on the far face of the bounding box join the last box
    last = np.maximum(np.ceil(span / scale - 1e-9) - 1, 0).astype(np.int64)
    cells = np.minimum(np.floor((cloud - origin) / scale).astype(np.int64), last)
    return int(np.unique(cells, axis=0).shape[0])


def box_dimension(cloud: np.ndarray, scales: Optional[Sequence[float]] = None,
                  drop: int = settings.BOX_DROP, confidence: float = settings.BOX_CONFIDENCE,
                  workers: Optional[int] = None) -> DimensionReport:
    """
    Estimate the box-counting dimension of a point cloud.

    Args:
        cloud: Points, shape (N, m) or (N,)
        scales: Box sizes (default: scale_ladder(cloud)); sorted decreasing
        drop: Scales left out at each end of the ladder
        confidence: Two-sided level of the t-quantile band
        workers: Process count (one task per scale)

    Returns:
        DimensionReport; a single-point cloud gives dimension 0 with a
        zero-width band
    """
    cloud = np.asarray(cloud, dtype=float)
    if cloud.ndim == 1:
        cloud = cloud[:, None]
    ambient = cloud.shape[1]
    distinct = np.unique(cloud, axis=0)
    if distinct.shape[0] <= 1:
        return DimensionReport(np.array([1.0]), np.array([distinct.shape[0]]), 0.0, (0.0, 0.0),
                               (1.0, 1.0), 0.0, int(cloud.shape[0]), ambient)

    scales = scale_ladder(cloud) if scales is None else np.asarray(scales, dtype=float)
    scales = np.sort(scales)[::-1]
    if np.any(scales <= 0):
        raise ValueError("box sizes must be positive")
    if len(scales) - 2 * drop < 3:
        raise ValueError(f"{len(scales)} scales leave fewer than 3 after dropping {drop} at each end")

    origin = cloud.min(axis=0)
    span = cloud.max(axis=0) - origin
    counts = np.array(parallel_map(partial(_count_boxes, cloud=cloud, origin=origin, span=span), scales,
                                   workers, description='Box counts', chunksize=1))

    window = slice(drop, len(scales) - drop)
    x = np.log(1.0 / scales[window])
    y = np.log(counts[window])
    fit = stats.linregress(x, y)
    slope = float(np.clip(fit.slope, 0.0, ambient))
    quantile = float(stats.t.ppf(0.5 + 0.5 * confidence, x.size - 2))
    half = quantile * float(fit.stderr)
    return DimensionReport(scales, counts, slope, (slope - half, slope + half),
                           (float(scales[window][-1]), float(scales[window][0])),
                           float(fit.stderr), int(cloud.shape[0]), ambient)


def product_cloud(fiber: np.ndarray, x1_range: Tuple[float, float], count: int) -> np.ndarray:
    """
    The sheet {x~1 in x1_range} x fiber sampled at `count` values of x~1.

    Returns:
        Points (x~1, x~2), shape (count * len(fiber), 2)
    """
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    fiber = np.asarray(fiber, dtype=float).ravel()
    x1 = np.linspace(x1_range[0], x1_range[1], count)
    a, b = np.meshgrid(x1, fiber, indexing='ij')
    return np.column_stack([a.ravel(), b.ravel()])


def dimension_tolerance(target: float) -> float:
    """Accepted |fitted - target|: tighter for the filled two-dimensional sheet."""
    return settings.DIMENSION_TOL_SHEET if target >= 2.0 else settings.DIMENSION_TOL
