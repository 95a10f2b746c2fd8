"""
Normal-Form Phase Model
=======================
Explicit generating function of the modified stable manifold in normal-form
coordinates x~ = (x~1, x~2), where the symbol reads 2 sqrt(E0) xi~1.

    phi~(x~) = (alpha x~2^2 - sign(alpha) e^(-1/nu) G(x~2/nu)) chi1(x~1/sqrt(nu)) chi2(x~2/nu)

with phi~+ = 0 and phi~- = alpha x~2^2. Without a ZeroSetFunction the G term
is absent. The real potential W~ = -2 sqrt(E0) d phi~/d x~1 bends the
unstable manifold onto the graph of grad phi~; it is supported in
[0, sqrt(nu)] x [-nu, nu] and its k-th derivatives are O(nu^(3/2 - k)).

The model is separable, phi~ = c1(x~1) B(x~2), so every partial is a
product of a step derivative and a derivative of B.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from config import settings
from escape.assembly import ConstructionError
from fractal.cantor import ZeroSetFunction
from symbols.bumps import SmoothBump, SmoothStep
from utils.parallel import parallel_map


@dataclass(frozen=True, eq=False)
class PhaseModel:
    """Parameters of the normal-form phase model."""

    E0: float = 1.0
    nu: float = 0.05
    alpha: float = settings.PHASE_ALPHA
    g: Optional[ZeroSetFunction] = None
    chi1: SmoothStep = field(default_factory=lambda: SmoothStep(0.0, 1.0))
    chi2: SmoothBump = field(default_factory=lambda: SmoothBump(0.5, 1.0))

    def __post_init__(self):
        if not settings.PHASE_NU_MIN <= self.nu <= settings.PHASE_NU_MAX:
            raise ValueError(
                f"nu must lie in [{settings.PHASE_NU_MIN}, {settings.PHASE_NU_MAX}], got {self.nu}"
            )
        if self.alpha == 0 or not np.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite and nonzero, got {self.alpha}")
        if not self.E0 > 0:
            raise ValueError(f"E0 must be positive, got {self.E0}")

    @property
    def damping(self) -> float:
        """e^(-1/nu); representable for nu >= PHASE_NU_MIN."""
        return float(np.exp(-1.0 / self.nu))

    @property
    def sign(self) -> float:
        return float(np.sign(self.alpha))

    @property
    def root_nu(self) -> float:
        return float(np.sqrt(self.nu))

    def phi_plus(self, x2):
        return np.zeros_like(np.asarray(x2, dtype=float))

    def phi_minus(self, x2):
        return self.alpha * np.asarray(x2, dtype=float) ** 2

    def with_nu(self, nu: float) -> 'PhaseModel':
        return PhaseModel(E0=self.E0, nu=nu, alpha=self.alpha, g=self.g, chi1=self.chi1, chi2=self.chi2)

    def with_alpha(self, alpha: float) -> 'PhaseModel':
        return PhaseModel(E0=self.E0, nu=self.nu, alpha=alpha, g=self.g, chi1=self.chi1, chi2=self.chi2)

    def parameters(self) -> dict:
        params = {'E0': self.E0, 'nu': self.nu, 'alpha': self.alpha, 'modified': self.g is not None}
        if self.g is not None:
            params.update({'K_dim': self.g.K.target_dim, 'K_depth': self.g.K.depth, 'g_res': self.g.res})
        return params


# =============================================================================
# SEPARABLE FACTORS
# =============================================================================

def _step_factors(model: PhaseModel, x1: np.ndarray) -> Tuple[np.ndarray, ...]:
    """c1 and its first three derivatives at x1."""
    r = model.root_nu
    t = x1 / r
    chi1 = model.chi1
    return (np.asarray(chi1.value(t)), np.asarray(chi1.derivative(t)) / r,
            np.asarray(chi1.second_derivative(t)) / r ** 2,
            np.asarray(chi1.third_derivative(t)) / r ** 3)


def _profile_factors(model: PhaseModel, x2: np.ndarray) -> Tuple[np.ndarray, ...]:
    """B = A c2 and its first two derivatives, plus A, A' and c2, c2'."""
    nu, alpha = model.nu, model.alpha
    s = x2 / nu
    a = np.abs(s)
    c2 = np.asarray(model.chi2.profile(a))
    c2_d = np.asarray(model.chi2.profile_derivative(a)) * np.sign(s) / nu
    c2_dd = np.asarray(model.chi2.profile_second_derivative(a)) / nu ** 2

    A = alpha * x2 ** 2
    A_d = 2.0 * alpha * x2
    A_dd = np.full_like(x2, 2.0 * alpha)
    if model.g is not None:
        inside = a < model.chi2.outer_radius
        G = np.zeros_like(x2)
        G_d = np.zeros_like(x2)
        G_dd = np.zeros_like(x2)
        if inside.any():
            G[inside] = model.g.G(s[inside])
            G_d[inside] = model.g.G_prime(s[inside])
            G_dd[inside] = model.g.G_second(s[inside])
        weight = model.sign * model.damping
        A = A - weight * G
        A_d = A_d - weight * G_d / nu
        A_dd = A_dd - weight * G_dd / nu ** 2

    B = A * c2
    B_d = A_d * c2 + A * c2_d
    B_dd = A_dd * c2 + 2.0 * A_d * c2_d + A * c2_dd
    return B, B_d, B_dd, A, A_d, c2, c2_d


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """phi~ with analytic partials; accepts a point (2,) or arrays x1, x2."""

    model: PhaseModel

    def value(self, x: np.ndarray) -> float:
        x1, x2 = (np.atleast_1d(np.asarray(c, dtype=float)) for c in x)
        c1 = _step_factors(self.model, x1)[0]
        B = _profile_factors(self.model, x2)[0]
        return float((c1 * B)[0])

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = (np.atleast_1d(np.asarray(c, dtype=float)) for c in x)
        c1, c1_d, _, _ = _step_factors(self.model, x1)
        B, B_d = _profile_factors(self.model, x2)[:2]
        return np.array([float((c1_d * B)[0]), float((c1 * B_d)[0])])

    def hessian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = (np.atleast_1d(np.asarray(c, dtype=float)) for c in x)
        c1, c1_d, c1_dd, _ = _step_factors(self.model, x1)
        B, B_d, B_dd = _profile_factors(self.model, x2)[:3]
        off = float((c1_d * B_d)[0])
        return np.array([[float((c1_dd * B)[0]), off], [off, float((c1 * B_dd)[0])]])

    def on_grid(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        """phi~ on the tensor grid x1 x x2, shape (len(x1), len(x2))."""
        c1 = _step_factors(self.model, np.asarray(x1, dtype=float))[0]
        B = _profile_factors(self.model, np.asarray(x2, dtype=float))[0]
        return np.outer(c1, B)

    def d1_on_grid(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        c1_d = _step_factors(self.model, np.asarray(x1, dtype=float))[1]
        B = _profile_factors(self.model, np.asarray(x2, dtype=float))[0]
        return np.outer(c1_d, B)

    def __call__(self, x: np.ndarray) -> float:
        return self.value(x)


def phase_build(model: PhaseModel) -> PhaseFunction:
    """Closed-form phi~ for the model."""
    return PhaseFunction(model)


# =============================================================================
# PULLBACK POTENTIAL
# =============================================================================

@dataclass(frozen=True, eq=False)
class PullbackPotential:
    """
    W(x) = W~(x - center), W~ = -2 sqrt(E0) d phi~/d x~1.

    Usable as a real potential of a symbol (value, gradient, hessian,
    parameters). `center` is the x-projection of the point where the
    normal-form chart is anchored.
    """

    model: PhaseModel
    center: Tuple[float, float] = (0.0, 0.0)

    @property
    def factor(self) -> float:
        return -2.0 * float(np.sqrt(self.model.E0))

    def _local(self, x) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return (np.atleast_1d(x[0] - self.center[0]), np.atleast_1d(x[1] - self.center[1]))

    def value(self, x) -> float:
        x1, x2 = self._local(x)
        c1_d = _step_factors(self.model, x1)[1]
        B = _profile_factors(self.model, x2)[0]
        return float(self.factor * (c1_d * B)[0])

    def gradient(self, x) -> np.ndarray:
        x1, x2 = self._local(x)
        _, c1_d, c1_dd, _ = _step_factors(self.model, x1)
        B, B_d = _profile_factors(self.model, x2)[:2]
        return self.factor * np.array([float((c1_dd * B)[0]), float((c1_d * B_d)[0])])

    def hessian(self, x) -> np.ndarray:
        x1, x2 = self._local(x)
        _, c1_d, c1_dd, c1_ddd = _step_factors(self.model, x1)
        B, B_d, B_dd = _profile_factors(self.model, x2)[:3]
        off = float((c1_dd * B_d)[0])
        return self.factor * np.array([[float((c1_ddd * B)[0]), off], [off, float((c1_d * B_dd)[0])]])

    def derivative_grids(self, x1: np.ndarray, x2: np.ndarray) -> Tuple[np.ndarray, ...]:
        """
        W~ and all its partials up to order 2 on the tensor grid (model coordinates).

        Returns:
            (W, W_1, W_2, W_11, W_12, W_22), each of shape (len(x1), len(x2))
        """
        _, c1_d, c1_dd, c1_ddd = _step_factors(self.model, np.asarray(x1, dtype=float))
        B, B_d, B_dd = _profile_factors(self.model, np.asarray(x2, dtype=float))[:3]
        f = self.factor
        return (f * np.outer(c1_d, B), f * np.outer(c1_dd, B), f * np.outer(c1_d, B_d),
                f * np.outer(c1_ddd, B), f * np.outer(c1_dd, B_d), f * np.outer(c1_d, B_dd))

    def parameters(self) -> dict:
        params = {'name': 'pullback_potential', 'center': list(self.center)}
        params.update(self.model.parameters())
        return params

    def __call__(self, x) -> float:
        return self.value(x)


def pullback_potential(model: PhaseModel, center: Sequence[float] = (0.0, 0.0),
                       check_points: int = 81) -> PullbackPotential:
    """
    Build W~ and verify its support lies in [0, sqrt(nu)] x [-nu, nu].

    Args:
        model: PhaseModel
        center: Anchor of the chart in original x coordinates
        check_points: Grid points per axis of the support check

    Returns:
        PullbackPotential

    Raises:
        ConstructionError: W~ is nonzero outside the support box
    """
    potential = PullbackPotential(model, (float(center[0]), float(center[1])))
    r, nu = model.root_nu, model.nu
    x1 = np.linspace(-r, 2.0 * r, check_points)
    x2 = np.linspace(-2.0 * nu, 2.0 * nu, check_points)
    W = potential.derivative_grids(x1, x2)[0]

    outside = ((x1 < 0.0) | (x1 > r))[:, None] | (np.abs(x2) > nu)[None, :]
    scale = max(float(np.abs(W).max()), 1.0)
    leak = float(np.abs(W[outside]).max()) if outside.any() else 0.0
    if leak > 1e-14 * scale:
        worst = np.unravel_index(np.argmax(np.where(outside, np.abs(W), 0.0)), W.shape)
        raise ConstructionError(
            f"pullback potential is {leak:.3e} outside [0, sqrt(nu)] x [-nu, nu]",
            worst_sample=np.array([x1[worst[0]], x2[worst[1]]]),
        )
    return potential


def embed_phase_model(symbol, model: PhaseModel, center: Optional[Sequence[float]] = None):
    """
    Add the pullback potential of `model` to a 2-D symbol.

    The chart is x = center + x~ (identity differential at the anchor); the
    default anchor is the origin, the midpoint of the axis heteroclinic of
    the double-bump symbol.

    Returns:
        A copy of `symbol` carrying W as its real perturbation
    """
    from symbols.double_bump import DoubleBump
    from symbols.quartic import Quartic2D

    potential = pullback_potential(model, center if center is not None else (0.0, 0.0))
    if isinstance(symbol, DoubleBump):
        return symbol.with_changes(w_potential=potential)
    if isinstance(symbol, Quartic2D):
        return Quartic2D(lam=symbol.lam, base=symbol.base, chi=symbol.chi, modification=potential)
    raise ValueError(f"cannot embed a phase model in symbol '{getattr(symbol, 'name', symbol)}'")


# =============================================================================
# HETEROCLINIC FIBER
# =============================================================================

def fiber_residual(model: PhaseModel, x2: np.ndarray, x1_slice: Optional[float] = None) -> np.ndarray:
    """d phi~/d x~2 - d phi~-/d x~2 at (x1_slice, x2); x1_slice defaults to sqrt(nu)."""
    x1 = model.root_nu if x1_slice is None else x1_slice
    c1 = _step_factors(model, np.atleast_1d(float(x1)))[0]
    B_d = _profile_factors(model, np.asarray(x2, dtype=float))[1]
    return c1[0] * B_d - 2.0 * model.alpha * np.asarray(x2, dtype=float)


def _residual_task(args):
    model, x2, x1_slice = args
    return fiber_residual(model, x2, x1_slice)


def heteroclinic_extract(model: PhaseModel, x1_slice: Optional[float] = None,
                         res: Optional[float] = None, chunks: int = 8,
                         workers: Optional[int] = None) -> np.ndarray:
    """
    Zero set of d phi~/d x~2 - d phi~-/d x~2 on an x~2 grid over [-nu, nu].

    A grid value counts as zero when its magnitude is at most 1e-12 times the
    residual scale: the largest magnitude on the plateau |x~2| <= nu/2 when
    that is nonzero (modified model), otherwise on the whole grid.

    Args:
        model: PhaseModel
        x1_slice: x~1 of the slice (>= sqrt(nu), default sqrt(nu))
        res: Grid step (default nu / FRACTAL_RES_DIVISOR)
        chunks: Grid chunks handed to the worker pool
        workers: Process count

    Returns:
        Ascending x~2 values of the fiber
    """
    if x1_slice is None:
        x1_slice = model.root_nu
    if x1_slice < model.root_nu:
        raise ValueError(f"x1_slice must be >= sqrt(nu) = {model.root_nu:.6g}, got {x1_slice}")
    nu = model.nu
    res = nu / settings.FRACTAL_RES_DIVISOR if res is None else float(res)
    if not res > 0:
        raise ValueError(f"res must be positive, got {res}")

    grid = np.linspace(-nu, nu, int(round(2.0 * nu / res)) + 1)
    pieces = np.array_split(grid, max(1, chunks))
    values = np.concatenate(parallel_map(_residual_task, [(model, p, x1_slice) for p in pieces],
                                         workers, description='Fiber scan', chunksize=1))

    plateau = np.abs(grid) <= 0.5 * nu
    scale = float(np.abs(values[plateau]).max()) if plateau.any() else 0.0
    if scale == 0.0:
        scale = float(np.abs(values).max())
    zero_tol = 1e-12 * scale
    return grid[np.abs(values) <= zero_tol]


# =============================================================================
# SIGN STRUCTURE AND SCALING CHECKS
# =============================================================================

@dataclass
class SignStructureReport:
    """Pointwise sign check of the three terms of the fiber residual."""

    samples: int
    term_violations: Tuple[int, int, int]
    magnitude_violations: int
    max_magnitude_ratio: float

    @property
    def passed(self) -> bool:
        return sum(self.term_violations) == 0 and self.magnitude_violations == 0

    def as_dict(self) -> dict:
        return {
            'samples': self.samples,
            'term_violations': list(self.term_violations),
            'magnitude_violations': self.magnitude_violations,
            'max_magnitude_ratio': self.max_magnitude_ratio,
            'passed': self.passed,
        }


def sign_structure_check(model: PhaseModel, samples: int = 2001) -> SignStructureReport:
    """
    Check the sign of each residual term on x~1 >= sqrt(nu).

    Terms: 2 alpha x~2 (c2 - 1), -sign(alpha) e^(-1/nu) x~2 g~^2 c2 / nu^2 and
    A c2'. Each must have the sign of -alpha x~2. On the support of c2' the
    damping term must satisfy |e^(-1/nu) G~| <= |alpha| x~2^2 / 2.
    """
    nu, alpha = model.nu, model.alpha
    x2 = np.linspace(-nu, nu, samples)
    s = x2 / nu
    _, _, _, A, _, c2, c2_d = _profile_factors(model, x2)

    t1 = 2.0 * alpha * x2 * (c2 - 1.0)
    t2 = np.zeros_like(x2)
    G = np.zeros_like(x2)
    if model.g is not None:
        inside = np.abs(s) < model.chi2.outer_radius
        g = np.asarray(model.g.g(s))
        t2 = -model.sign * model.damping * x2 * g ** 2 * c2 / nu ** 2
        if inside.any():
            G[inside] = model.g.G(s[inside])
    t3 = A * c2_d

    terms = np.vstack([t1, t2, t3])
    tol = 1e-12 * max(float(np.abs(terms).max()), np.finfo(float).tiny)
    oriented = -model.sign * np.sign(x2) * terms
    violations = tuple(int(np.sum(row < -tol)) for row in oriented)

    edge = (np.abs(s) > model.chi2.inner_radius) & (np.abs(s) < model.chi2.outer_radius)
    bound = 0.5 * abs(alpha) * x2[edge] ** 2
    damped = model.damping * np.abs(G[edge])
    ratio = float(np.max(damped / bound)) if edge.any() else 0.0
    return SignStructureReport(samples, violations, int(np.sum(damped > bound)), ratio)


@dataclass
class ScalingReport:
    """sup |d^k W~| across a nu ladder with fitted log-log exponents."""

    ladder: Tuple[float, ...]
    sups: np.ndarray
    exponents: Tuple[float, ...]
    expected: Tuple[float, ...] = (1.5, 0.5, -0.5)
    tolerance: float = 0.25

    @property
    def passed(self) -> bool:
        return all(abs(e - x) <= self.tolerance for e, x in zip(self.exponents, self.expected))

    def as_rows(self) -> list:
        rows = []
        for i, nu in enumerate(self.ladder):
            for order in range(len(self.expected)):
                rows.append({'nu': nu, 'order': order, 'sup': float(self.sups[i, order])})
        return rows

    def as_dict(self) -> dict:
        return {
            'ladder': list(self.ladder),
            'exponents': list(self.exponents),
            'expected': list(self.expected),
            'tolerance': self.tolerance,
            'passed': self.passed,
        }


def derivative_scaling(model: PhaseModel, ladder: Sequence[float] = (0.1, 0.05, 0.025),
                       grid: int = 81) -> ScalingReport:
    """
    Fit the exponents of sup |d^k W~| against nu for k = 0, 1, 2.

    Sups are taken over all partials of order k on a grid covering the
    support box [0, sqrt(nu)] x [-nu, nu].
    """
    if len(ladder) < 2:
        raise ValueError(f"the nu ladder needs at least 2 values, got {list(ladder)}")
    sups = []
    for nu in ladder:
        potential = PullbackPotential(model.with_nu(nu))
        x1 = np.linspace(0.0, np.sqrt(nu), grid)
        x2 = np.linspace(-nu, nu, grid)
        W, W1, W2, W11, W12, W22 = potential.derivative_grids(x1, x2)
        sups.append([np.abs(W).max(),
                     max(np.abs(W1).max(), np.abs(W2).max()),
                     max(np.abs(W11).max(), np.abs(W12).max(), np.abs(W22).max())])
    sups = np.asarray(sups)
    log_nu = np.log(np.asarray(ladder, dtype=float))
    exponents = tuple(float(linregress(log_nu, np.log(sups[:, k])).slope) for k in range(3))
    return ScalingReport(tuple(float(v) for v in ladder), sups, exponents)
