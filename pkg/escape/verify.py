"""
Escape Inequality Verification
==============================
Pointwise checks of the escape inequalities on sampled energy shells.

This module handles:
- Shell sampling for the scalar, quartic and matrix sweeps
- H_p G >= c min(dist(rho, reference)^2, 1) for the glued escape function
- The quartic bracket at infinity with the chi_zeta windows
- The matrix inequality {p, G Id} >= lower bound (min eigenvalue margin)

Failures are data: they are listed in the MarginReport, never raised.
"""

from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Tuple

import numpy as np

from config import settings
from dynamics.classify import distance_to_set, momentum_roots
from escape.assembly import EscapeAssembly, EscapeFunction
from symbols.bumps import SmoothBump
from symbols.quartic import quartic_xi_lambda
from utils.numerics import central_gradient, make_rng
from utils.parallel import parallel_map


@dataclass
class MarginReport:
    """Per-sample bracket values, distances and ratios with their summary."""

    kind: str
    samples: np.ndarray
    values: np.ndarray
    distances: np.ndarray
    ratios: np.ndarray
    threshold: float = 0.0
    floor: Optional[float] = None
    excluded: int = 0
    parameters: dict = field(default_factory=dict)

    @property
    def min_ratio(self) -> float:
        finite = self.ratios[np.isfinite(self.ratios)]
        return float(finite.min()) if len(finite) else np.nan

    @property
    def failure_mask(self) -> np.ndarray:
        return np.isfinite(self.ratios) & ~(self.ratios > self.threshold)

    @property
    def failures(self) -> np.ndarray:
        return self.samples[self.failure_mask]

    @property
    def worst_sample(self) -> Optional[np.ndarray]:
        finite = np.isfinite(self.ratios)
        if not finite.any():
            return None
        index = np.flatnonzero(finite)[np.argmin(self.ratios[finite])]
        return self.samples[index]

    @property
    def meets_floor(self) -> bool:
        return self.floor is None or (np.isfinite(self.min_ratio) and self.min_ratio >= self.floor)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.min_ratio) and not self.failure_mask.any())

    def as_rows(self) -> List[dict]:
        n = self.samples.shape[1] // 2 if len(self.samples) else 0
        mask = self.failure_mask
        rows = []
        for k, z in enumerate(self.samples):
            row = {f"x{i + 1}": z[i] for i in range(n)}
            row.update({f"xi{i + 1}": z[n + i] for i in range(n)})
            row.update({
                'value': self.values[k],
                'distance': self.distances[k],
                'ratio': self.ratios[k],
                'failure': bool(mask[k]),
            })
            rows.append(row)
        return rows

    def as_dict(self, max_failures: int = 50) -> dict:
        return {
            'kind': self.kind,
            'parameters': self.parameters,
            'samples': int(len(self.samples)),
            'excluded': int(self.excluded),
            'min_ratio': self.min_ratio,
            'floor': self.floor,
            'meets_floor': bool(self.meets_floor),
            'threshold': self.threshold,
            'failure_count': int(self.failure_mask.sum()),
            'failure_samples': self.failures[:max_failures].tolist(),
            'passed': self.passed,
        }


# =============================================================================
# SAMPLING
# =============================================================================
def shell_samples(s, E0: float, delta: float, count: int, seed: int = 0,
                  anchors: Optional[np.ndarray] = None, spread: float = 0.25,
                  radius: Optional[float] = None) -> np.ndarray:
    """
    Deterministic samples of p^{-1}([E0 - delta, E0 + delta]).

    Every other draw is centred on a random anchor when anchors are given,
    so that neighbourhoods of the trapped set are well represented.

    Args:
        s: Scalar symbol
        E0: Energy
        delta: Half-width of the energy window
        count: Number of samples
        seed: Random seed
        anchors: Optional phase points whose x-projections attract samples
        spread: Standard deviation of the x offset around an anchor
        radius: Half-width of the uniform x box (default: support radius + 1)

    Returns:
        Array shaped (count, 2n), fewer if the shell is hard to hit
    """
    n = s.n
    rng = make_rng(seed, 1)
    radius = s.support_radius + 1.0 if radius is None else radius
    max_momentum = 2.0 * np.sqrt(max(abs(E0) + delta, 1e-12)) + 2.0

    points: List[np.ndarray] = []
    attempts = 0
    while len(points) < count and attempts < 50 * count:
        attempts += 1
        if anchors is not None and len(anchors) and attempts % 2 == 0:
            anchor = anchors[rng.integers(len(anchors))]
            x = anchor[:n] + spread * rng.normal(size=n)
        else:
            x = rng.uniform(-radius, radius, size=n)
        if n == 1:
            direction = np.array([1.0 if rng.uniform() < 0.5 else -1.0])
        else:
            angle = rng.uniform(0.0, 2.0 * np.pi)
            direction = np.array([np.cos(angle), np.sin(angle)])
        energy = E0 + delta * rng.uniform(-1.0, 1.0)
        roots = momentum_roots(s.value, x, direction, energy, max_momentum, 32)
        if roots:
            points.append(np.concatenate([x, roots[rng.integers(len(roots))] * direction]))
    return np.array(points) if points else np.zeros((0, 2 * n))


# =============================================================================
# GLUED ESCAPE FUNCTION
# =============================================================================
def _bracket_parts_task(G: EscapeFunction, z: np.ndarray) -> Tuple[float, float]:
    """(H_p(psi_0 G_0), H_p G_inf) at z."""
    s = G.symbol
    velocity = s.field(z)
    glued = central_gradient(G.glued_part, z, settings.FD_STEP_GRADIENT) @ velocity
    outer = central_gradient(G.outer_part, z, settings.FD_STEP_GRADIENT) @ velocity
    return float(glued), float(outer)


def escape_bracket_parts(G: EscapeFunction, samples: np.ndarray,
                         workers: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    H_p(psi_0 G_0) and H_p G_inf at every sample.

    H_p G = nu H_p(psi_0 G_0) + H_p G_inf, so one sweep serves every nu.
    """
    results = parallel_map(partial(_bracket_parts_task, G), list(samples), workers,
                           description='Escape brackets')
    if not results:
        return np.zeros(0), np.zeros(0)
    parts = np.array(results, dtype=float)
    return parts[:, 0], parts[:, 1]


def scalar_margin(samples: np.ndarray, values: np.ndarray, reference: np.ndarray,
                  floor_tol: float = settings.FLOOR_TOL, excluded: int = 0,
                  parameters: Optional[dict] = None) -> MarginReport:
    """MarginReport with ratio = H_p G / min(dist^2, 1) where that denominator exceeds floor_tol."""
    distances = distance_to_set(samples, reference)
    denominators = np.minimum(distances ** 2, 1.0)
    ratios = np.full(len(samples), np.nan)
    usable = denominators > floor_tol
    ratios[usable] = values[usable] / denominators[usable]
    return MarginReport(
        kind='scalar',
        samples=samples,
        values=np.asarray(values, dtype=float),
        distances=distances,
        ratios=ratios,
        excluded=excluded,
        parameters=dict(parameters or {}, floor_tol=floor_tol),
    )


def split_absorbed(s, samples: np.ndarray) -> Tuple[np.ndarray, int]:
    """Drop samples inside the absorption window; returns (kept, dropped count)."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if s.absorption is None or len(samples) == 0:
        return samples, 0
    keep = np.array([not s.absorbs(z) for z in samples], dtype=bool)
    dropped = int((~keep).sum())
    if dropped:
        print(f"    Excluded {dropped} samples inside the absorption window")
    return samples[keep], dropped


def verify_escape(assembly: EscapeAssembly, s, shell_samples: np.ndarray,
                  reference_set: Optional[np.ndarray] = None,
                  floor_tol: float = settings.FLOOR_TOL,
                  workers: Optional[int] = None) -> MarginReport:
    """
    Check H_p G >= c min(dist(rho, reference)^2, 1) on shell samples.

    Args:
        assembly: EscapeAssembly (its nu_glue is used)
        s: Scalar symbol
        shell_samples: Points of p^{-1}([E0 - delta, E0 + delta])
        reference_set: Fixed points or a trapped-set sample (default: rho_1 and rho_2)
        floor_tol: Denominators min(dist^2, 1) at or below this are not used
        workers: Process count

    Returns:
        MarginReport (kind 'scalar')
    """
    samples, excluded = split_absorbed(s, shell_samples)
    if reference_set is None:
        reference_set = np.vstack([assembly.rho1.z, assembly.rho2.z])
    G = EscapeFunction(assembly, s)
    glued, outer = escape_bracket_parts(G, samples, workers)
    values = assembly.nu_glue * glued + outer
    return scalar_margin(samples, values, np.atleast_2d(reference_set), floor_tol, excluded,
                         parameters={'nu': assembly.nu_glue, 'C2': assembly.C2,
                                     'eps_ball': assembly.eps_ball})


# =============================================================================
# QUARTIC ESCAPE FUNCTION AT INFINITY
# =============================================================================
QUARTIC_SIGN_CHANGES = (0.0, float(np.sqrt(2.5)))


def quartic_factor(xi):
    """4 xi^4 - 10 xi^2."""
    return 4.0 * xi ** 4 - 10.0 * xi ** 2


def quartic_factor_values(lam: float) -> dict:
    """The factor at xi = 1, 2 and xi_lambda: -6, 24 and 9 + 4 lambda + 5 sqrt(9 + 4 lambda)."""
    xi_lam = quartic_xi_lambda(lam)
    return {
        'xi_1': quartic_factor(1.0),
        'xi_2': quartic_factor(2.0),
        'xi_lambda': quartic_factor(xi_lam),
        'xi_lambda_closed_form': 9.0 + 4.0 * lam + 5.0 * np.sqrt(9.0 + 4.0 * lam),
        'xi_lambda_root': xi_lam,
    }


def check_quartic_windows(lam: float, inner: float, outer: float):
    """
    Reject windows whose support crosses a sign change of 4 xi^4 - 10 xi^2 or another window.

    Raises:
        ValueError: Before any sampling
    """
    if not 0 < inner < outer:
        raise ValueError(f"window radii must satisfy 0 < inner < outer, got {inner}, {outer}")
    centers = (1.0, 2.0, quartic_xi_lambda(lam))
    for zeta in centers:
        lo, hi = zeta - outer, zeta + outer
        for change in QUARTIC_SIGN_CHANGES:
            if lo <= change <= hi:
                raise ValueError(
                    f"chi_{zeta:.6g} support [{lo:.6g}, {hi:.6g}] contains |xi| = {change:.6g}, "
                    "where 4 xi^4 - 10 xi^2 changes sign"
                )
    for a, b in zip(centers[:-1], centers[1:]):
        if b - a <= 2.0 * outer:
            raise ValueError(f"windows around |xi| = {a:.6g} and {b:.6g} overlap for outer radius {outer}")


class QuarticWindows:
    """w(xi) = chi_{xi_lambda}(xi) + chi_2(xi) - chi_1(xi), chi_zeta = bump(||xi| - zeta|)."""

    def __init__(self, lam: float, inner: float = settings.WINDOW_INNER, outer: float = settings.WINDOW_OUTER):
        check_quartic_windows(lam, inner, outer)
        self.lam = float(lam)
        self.bump = SmoothBump(inner, outer)
        self.weights = ((quartic_xi_lambda(lam), 1.0), (2.0, 1.0), (1.0, -1.0))

    def value(self, xi: float) -> float:
        a = abs(xi)
        return float(sum(w * self.bump.profile(abs(a - zeta)) for zeta, w in self.weights))

    def derivative(self, xi: float) -> float:
        a = abs(xi)
        return float(sum(w * self.bump.profile_derivative(abs(a - zeta)) * np.sign(a - zeta) * np.sign(xi)
                         for zeta, w in self.weights))

    def escape_gradient(self, z: np.ndarray) -> np.ndarray:
        """grad G for G = x xi w(xi) + y eta, ordered (x, y, xi, eta)."""
        x, y, xi, eta = z
        w, dw = self.value(xi), self.derivative(xi)
        return np.array([xi * w, eta, x * (w + xi * dw), y])

    def closed_form(self, z: np.ndarray) -> float:
        """(4 xi^4 - 10 xi^2) w(xi) + (4 eta^4 + 2 eta^2) + 2 lambda y^2 exp(-y^2)."""
        _, y, xi, eta = z
        return float(quartic_factor(xi) * self.value(xi) + 4.0 * eta ** 4 + 2.0 * eta ** 2
                     + 2.0 * self.lam * y ** 2 * np.exp(-y ** 2))


def _shell_xi(c: float, branch: int) -> Optional[float]:
    """|xi| with (xi^2 - 1)(xi^2 - 4) = c on the given branch (+1 outer, -1 inner)."""
    disc = 9.0 + 4.0 * c
    if disc < 0:
        return None
    square = (5.0 + branch * np.sqrt(disc)) / 2.0
    return float(np.sqrt(square)) if square >= 0 else None


def quartic_shell_samples(lam: float, count: int, seed: int = 0,
                          radius: float = settings.COMPACT_RADIUS, span: float = 6.0,
                          y_max: float = 8.0) -> np.ndarray:
    """
    Samples of p_0^{-1}(0) with max(|x|, |y|) >= radius.

    p_0 = (xi^2 - 1)(xi^2 - 4) + eta^4 + eta^2 + lambda (exp(-y^2) - 1); for
    given (x, y, eta) the xi-roots are solved in closed form. The points
    (xi = +-1, +-2 at y = eta = 0) and (xi = +-xi_lambda at y = y_max) are
    always included.
    """
    rng = make_rng(seed, 2)
    eta_max = float(np.sqrt((-1.0 + np.sqrt(1.0 + 4.0 * (lam + 2.25))) / 2.0))
    points = []
    far_c = lam * (1.0 - np.exp(-y_max ** 2))
    for xi in (1.0, -1.0, 2.0, -2.0):
        points.append([radius + 1.0, 0.0, xi, 0.0])
    for sign in (1.0, -1.0):
        points.append([0.0, y_max, sign * _shell_xi(far_c, 1), 0.0])

    attempts = 0
    while len(points) < count and attempts < 50 * count:
        attempts += 1
        x = rng.uniform(-radius - span, radius + span)
        y = rng.uniform(-y_max, y_max)
        if max(abs(x), abs(y)) < radius:
            continue
        eta = rng.uniform(-eta_max, eta_max)
        c = lam * (1.0 - np.exp(-y ** 2)) - eta ** 4 - eta ** 2
        xi = _shell_xi(c, 1 if rng.uniform() < 0.5 else -1)
        if xi is None:
            continue
        points.append([x, y, xi if rng.uniform() < 0.5 else -xi, eta])
    return np.array(points[:max(count, 6)], dtype=float)


def fit_quartic_floor(lam: float, inner: float = settings.WINDOW_INNER) -> dict:
    """
    nu and eps of the quartic lower bound.

    nu: largest nu <= inner with |4 xi^4 - 10 xi^2| >= nu within nu of +-1, +-2, +-xi_lambda.
    delta: largest delta for which eta^2 < delta and y^2 < delta (or y^2 > 1/delta)
        on p_0 = 0 force xi within nu of those points.
    eps: min of (4 eta^4 + 2 eta^2) + 2 lambda y^2 exp(-y^2) over eta^2 >= delta or
        y^2 in [delta, 1/delta].
    """
    xi_lam = quartic_xi_lambda(lam)
    roots = (1.0, 2.0, xi_lam)
    nu = inner
    for nu in inner * 0.5 ** np.arange(40):
        if min(np.min(np.abs(quartic_factor(np.linspace(r - nu, r + nu, 401)))) for r in roots) >= nu:
            break

    def displacement(delta: float) -> float:
        near = delta ** 2 + delta + lam * (1.0 - np.exp(-delta))
        far = delta ** 2 + delta + lam * np.exp(-1.0 / delta)
        candidates = [(shift, branch, target) for shift in (-near, near)
                      for branch, target in ((-1, 1.0), (1, 2.0))]
        candidates += [(lam + shift, 1, xi_lam) for shift in (-far, far)]
        worst = 0.0
        for c, branch, target in candidates:
            xi = _shell_xi(c, branch)
            worst = max(worst, np.inf if xi is None else abs(xi - target))
        return worst

    delta = 0.5
    for delta in 0.5 ** np.arange(1, 60):
        if displacement(delta) <= nu:
            break
    eps = min(4.0 * delta ** 2 + 2.0 * delta,
              2.0 * lam * min(delta * np.exp(-delta), np.exp(-1.0 / delta) / delta))
    return {'nu': float(nu), 'delta': float(delta), 'eps': float(eps), 'floor': float(min(nu, eps))}


def verify_quartic_escape(s, lam: Optional[float] = None,
                          inner: float = settings.WINDOW_INNER, outer: float = settings.WINDOW_OUTER,
                          samples: Optional[np.ndarray] = None, count: int = 2000, seed: int = 0,
                          radius: float = settings.COMPACT_RADIUS) -> MarginReport:
    """
    Check H_{p_0} G >= min(nu, eps) at infinity for G = x xi w(xi) + y eta.

    Args:
        s: Quartic2D symbol
        lam: lambda (default: the symbol's)
        inner: Radius where each chi_zeta equals 1
        outer: Support radius of each chi_zeta
        samples: Points of p_0^{-1}(0) (default: quartic_shell_samples)
        count: Sample count when samples are drawn here
        seed: Sampling seed
        radius: Compact radius for the default samples

    Returns:
        MarginReport (kind 'quartic'; ratios are the closed-form bracket values)

    Raises:
        ValueError: Windows too wide, checked before sampling
    """
    lam = s.lam if lam is None else float(lam)
    windows = QuarticWindows(lam, inner, outer)
    floor = fit_quartic_floor(lam, inner)
    if samples is None:
        samples = quartic_shell_samples(lam, count, seed, radius)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))

    values = np.array([windows.closed_form(z) for z in samples])
    numeric = []
    for z in samples:
        gp = s.gradient(z)
        gg = windows.escape_gradient(z)
        numeric.append(gp[2] * gg[0] - gp[0] * gg[2] + gp[3] * gg[1] - gp[1] * gg[3])
    residual = float(np.max(np.abs(np.array(numeric) - values))) if len(values) else 0.0

    return MarginReport(
        kind='quartic',
        samples=samples,
        values=values,
        distances=np.full(len(samples), np.nan),
        ratios=values.copy(),
        floor=floor['floor'],
        parameters={
            'lambda': lam, 'window_inner': inner, 'window_outer': outer, 'compact_radius': radius,
            'nu': floor['nu'], 'eps': floor['eps'], 'delta': floor['delta'],
            'factor_values': quartic_factor_values(lam), 'bracket_residual': residual,
        },
    )


# =============================================================================
# MATRIX ESCAPE FUNCTION
# =============================================================================
def matrix_escape_terms(s, delta: float, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    {p, (y eta + delta x xi (1 - g_x g_y)) Id} and its lower bound at z = (x, y, xi, eta).

    The bracket is d_xi p d_x G - d_x p d_xi G + d_eta p d_y G - d_y p d_eta G with
    the matrix partials of p; the bound is
    (2 eta^2 + 2 delta xi^2 (1 - g_x g_y) + |y phi'(y)| psi(x)) Id.
    """
    x, y, xi, eta = z
    _, (dPx, dPy, dPxi, dPeta) = s.matrix_derivatives(z)
    gx, dgx = s.g_x.value(x), s.g_x.derivative(x)
    gy, dgy = s.g_y.value(y), s.g_y.derivative(y)
    cut = 1.0 - gx * gy
    Gx = delta * xi * (cut - x * dgx * gy)
    Gy = eta - delta * x * xi * gx * dgy
    Gxi = delta * x * cut
    Geta = y
    lhs = dPxi * Gx + dPeta * Gy - dPx * Gxi - dPy * Geta
    _, dphi = s.phi(y)
    bound = 2.0 * eta ** 2 + 2.0 * delta * xi ** 2 * cut + abs(y * dphi) * s.psi.value(x)
    return lhs, bound * np.eye(2)


def yeta_bracket(s, z: np.ndarray) -> np.ndarray:
    """{p, y eta Id} = 2 eta^2 Id - R(x, xi) y chi~'(y) - lambda y phi'(y) psi(x) Id."""
    x, y, xi, eta = z
    R, _, _ = s.remainder(x, xi)
    _, dphi = s.phi(y)
    return (2.0 * eta ** 2 * np.eye(2) - R * y * s.chi_tilde.derivative(y)
            - s.lam * y * dphi * s.psi.value(x) * np.eye(2))


def _determinant_coefficients(s, x: float, y: float, eta: float) -> np.ndarray:
    """det p as a quartic polynomial in xi (highest power first)."""
    ct = s.chi_tilde.value(y)
    ph, _ = s.phi(y)
    shift = s.lam * ph * s.psi.value(x)
    b = s.delta * s.chi.value(x) * ct
    c1 = eta ** 2 - 1.0 - s.lam + (s.V1(x) + 1.0) * ct + shift
    c2 = eta ** 2 - 4.0 - s.lam + (s.V2(x) + 4.0) * ct + shift
    e = s.eps * s.w.value(x) * ct
    return np.array([1.0, -b, c1 + c2, -b * c2, c1 * c2 - e ** 2])


def _require_extension(s):
    if not getattr(s, 'is_matrix', False) or s.n != 2:
        raise ValueError("matrix escape checks need the 2 x 2 symbol on T*R^2 (MatrixSymbol with n = 2)")


def matrix_surface_samples(s, count: int, seed: int = 0, x_range: Tuple[float, float] = (-6.0, 6.0),
                           y_range: Tuple[float, float] = (-1.2, 1.2), segment_points: int = 21) -> np.ndarray:
    """
    Samples of det p = 0: random (x, y, eta), xi from the real roots of the quartic det p.

    The segment y = eta = 0, x in [-1, 1] contributes `segment_points` x values.
    """
    _require_extension(s)
    rng = make_rng(seed, 4)
    eta_max = float(np.sqrt(s.lam + 5.0))
    points = []

    def add_roots(x, y, eta, pick=None):
        roots = np.roots(_determinant_coefficients(s, x, y, eta))
        real = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
        chosen = real if pick is None or not len(real) else [real[pick % len(real)]]
        for xi in chosen:
            points.append([x, y, xi, eta])

    for x in np.linspace(-1.0, 1.0, segment_points):
        add_roots(float(x), 0.0, 0.0)
    attempts = 0
    while len(points) < count and attempts < 50 * count:
        attempts += 1
        add_roots(rng.uniform(*x_range), rng.uniform(*y_range), rng.uniform(-eta_max, eta_max),
                  pick=int(rng.integers(4)))
    return np.array(points[:max(count, segment_points)], dtype=float)


def _matrix_task(args):
    s, delta, z = args
    P = s.value(z)
    scale = max(1.0, float(np.linalg.norm(P)) ** 2)
    if abs(np.linalg.det(P)) > settings.SURFACE_TOL * scale:
        return None
    lhs, rhs = matrix_escape_terms(s, delta, z)
    return float(np.linalg.eigvalsh(lhs - rhs)[0])


def verify_matrix_escape(s, delta: float = settings.MATRIX_ESCAPE_DELTA,
                         samples: Optional[np.ndarray] = None, count: int = 2000, seed: int = 0,
                         workers: Optional[int] = None) -> MarginReport:
    """
    Check lambda_min({p, G Id} - lower bound) >= -PSD_TOL on det p = 0.

    Args:
        s: MatrixSymbol with n = 2
        delta: Coefficient of x xi (1 - g_x g_y) in G
        samples: Points of det p = 0 (default: matrix_surface_samples)
        count: Sample count when samples are drawn here
        seed: Sampling seed
        workers: Process count

    Returns:
        MarginReport (kind 'matrix'; ratios are the eigenvalue margins)
    """
    _require_extension(s)
    if samples is None:
        samples = matrix_surface_samples(s, count, seed)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    margins = parallel_map(_matrix_task, [(s, delta, z) for z in samples], workers,
                           description='Matrix margins')
    keep = np.array([m is not None for m in margins], dtype=bool)
    excluded = int((~keep).sum())
    if excluded:
        print(f"    Excluded {excluded} samples off det p = 0 (|det p| > {settings.SURFACE_TOL:g} |p|^2)")
    values = np.array([m for m in margins if m is not None], dtype=float)
    return MarginReport(
        kind='matrix',
        samples=samples[keep],
        values=values,
        distances=np.full(len(values), np.nan),
        ratios=values.copy(),
        threshold=-settings.PSD_TOL,
        excluded=excluded,
        parameters={'delta': delta, 'lambda': s.lam, 'psd_tol': settings.PSD_TOL,
                    'surface_tol': settings.SURFACE_TOL},
    )
