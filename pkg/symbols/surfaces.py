"""
Energy Surfaces
===============
Contour tracing of energy surfaces on 2-D slices of phase space with
contourpy. Branches are returned as (m, 2) arrays of (horizontal, vertical)
coordinates; closed loops repeat their first point.
"""

from typing import Callable, List, Sequence, Tuple

import contourpy
import numpy as np

from symbols.matrix import MatrixSymbol

Window = Tuple[float, float, float, float]


def _trace(values: np.ndarray, h: np.ndarray, v: np.ndarray, level: float) -> List[np.ndarray]:
    if not (np.nanmin(values) <= level <= np.nanmax(values)):
        return []
    generator = contourpy.contour_generator(h, v, values, line_type=contourpy.LineType.Separate)
    return [np.asarray(line) for line in generator.lines(level) if len(line) > 1]


def matrix_energy_surface(s: MatrixSymbol, window: Window, resolution: int = 801) -> List[np.ndarray]:
    """
    Branches of det q = 0 for the 1-D matrix symbol.

    Args:
        s: MatrixSymbol with n = 1
        window: (x_min, x_max, xi_min, xi_max)
        resolution: Grid points per axis

    Returns:
        List of (m, 2) arrays of (x, xi) points; empty when det q has no zero in the window
    """
    if s.n != 1:
        raise ValueError("matrix_energy_surface traces the 1-D symbol; use a slice for n = 2")
    x_min, x_max, xi_min, xi_max = window
    if not (x_max > x_min and xi_max > xi_min):
        raise ValueError(f"degenerate window {window}")
    x = np.linspace(x_min, x_max, resolution)
    xi = np.linspace(xi_min, xi_max, resolution)
    X, XI = np.meshgrid(x, xi)
    return _trace(s.determinant_grid(X, XI), x, xi, 0.0)


def trace_energy_surface(value: Callable[[np.ndarray], float], base_point: Sequence[float],
                         axes: Tuple[int, int], window: Window, level: float = 0.0,
                         resolution: int = 201) -> List[np.ndarray]:
    """
    Level set of a scalar symbol restricted to a 2-D coordinate slice.

    Args:
        value: Scalar function of the full phase array (e.g. symbol.value)
        base_point: Phase point fixing the other coordinates
        axes: Indices of the two varied coordinates
        window: (h_min, h_max, v_min, v_max) along those coordinates
        level: Energy level
        resolution: Grid points per axis

    Returns:
        List of (m, 2) arrays in slice coordinates
    """
    h = np.linspace(window[0], window[1], resolution)
    v = np.linspace(window[2], window[3], resolution)
    base = np.asarray(base_point, dtype=float)
    values = np.empty((resolution, resolution))
    for j, vj in enumerate(v):
        for i, hi in enumerate(h):
            z = base.copy()
            z[axes[0]] = hi
            z[axes[1]] = vj
            values[j, i] = value(z)
    return _trace(values, h, v, level)


def surface_roots(s: MatrixSymbol, x: float) -> np.ndarray:
    """
    Real roots xi of det q(x, xi) = 0, sorted.

    det q = (xi^2 - c xi + v1)(xi^2 + v2) - (eps w)^2 with c = delta chi(x)
    is a quartic polynomial in xi.
    """
    c = s.delta * s.chi.value(x)
    v1, v2 = s.V1(x), s.V2(x)
    coupling = (s.eps * s.w.value(x)) ** 2
    roots = np.roots([1.0, -c, v1 + v2, -c * v2, v1 * v2 - coupling])
    real = roots[np.abs(roots.imag) < 1e-6].real
    return np.sort(real)


def avoided_crossing_gap(s: MatrixSymbol, half_width: float = 0.05, samples: int = 2001) -> float:
    """
    Smallest vertical distance between the two upper surface branches near x_+.

    With coupling eps > 0 the branches stay apart; with eps = 0 they cross
    and the gap shrinks to the x-sampling resolution.
    """
    best = np.inf
    for x in np.linspace(s.x_plus - half_width, s.x_plus + half_width, samples):
        roots = surface_roots(s, x)
        positive = roots[roots > 0]
        if positive.size >= 2:
            best = min(best, float(np.min(np.diff(positive))))
    return best
