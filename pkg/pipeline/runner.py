"""
Scenario Runner
===============
Executes a scenario: symbol build, then the stages listed in its STAGES
tuple, each writing its reports into the run directory. The manifest is
written last.

This module handles:
- Building the scenario symbol from its UPPER_CASE parameters
- One function per stage, sharing a RunContext
- Stage timing, failure capture and verification verdicts
"""

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from config import settings
from dynamics import (
    INCOMING,
    OUTGOING,
    AxisPatch,
    ChartRequest,
    FoldDetected,
    ShellGrid,
    convexity_check,
    degree_diagnostic,
    distance_to_set,
    find_fixed_points,
    generating_function,
    gronwall_check,
    heteroclinic_shoot,
    manifold_mismatch,
    place_potential_window,
    reversal_defect,
    sample_trapped_set,
    scattering_deflection,
    shell_points,
)
from escape import (
    assemble_G,
    build_assembly,
    confinement_report,
    fit_quartic_floor,
    identity_report,
    quartic_factor_values,
    shell_samples,
    verify_matrix_escape,
    verify_quartic_escape,
)
from export import RunManifest, points_frame, write_csv, write_json
from fractal import (
    PhaseModel,
    box_dimension,
    cantor_build,
    derivative_scaling,
    dimension_tolerance,
    embed_phase_model,
    heteroclinic_extract,
    phase_build,
    point_set,
    product_cloud,
    pullback_potential,
    scale_ladder,
    sign_structure_check,
    zero_set_function,
)
from symbols import (
    AbsorptionSpec,
    DoubleBump,
    MatrixSymbol,
    QuadraticForm,
    Quartic1D,
    Quartic2D,
    RadialBarrier,
    SmoothBump,
    avoided_crossing_gap,
    matrix_energy_surface,
    top_branch,
)
from utils.numerics import make_rng


@dataclass
class RunContext:
    """State shared by the stages of one run."""

    config: dict
    run_dir: str
    manifest: RunManifest
    symbol: object = None
    matrix: Optional[MatrixSymbol] = None
    fixed_points: list = field(default_factory=list)
    trapped: object = None
    captures: Dict[str, list] = field(default_factory=dict)
    phase_model: Optional[PhaseModel] = None

    @property
    def workers(self) -> int:
        return int(self.config.get('WORKERS') or settings.WORKERS)

    @property
    def seed(self) -> int:
        return int(self.config['SEED'])

    @property
    def E0(self) -> float:
        return float(self.config['E0'])

    @property
    def hyperbolic(self) -> list:
        """Hyperbolic fixed points ordered by their first position coordinate."""
        points = [r for r in self.fixed_points if r.hyperbolic]
        return sorted(points, key=lambda r: r.z[0])

    def pair(self):
        points = self.hyperbolic
        if len(points) < 2:
            raise ValueError(f"need two hyperbolic fixed points, found {len(points)}")
        return points[0], points[-1]

    def csv(self, rows, name: str, columns: Optional[list] = None) -> str:
        path = write_csv(rows, os.path.join(self.run_dir, name), columns=columns)
        self.manifest.add_artifact(path)
        return path

    def json(self, payload: dict, name: str) -> str:
        path = write_json(payload, os.path.join(self.run_dir, name))
        self.manifest.add_artifact(path)
        return path


# =============================================================================
# SYMBOL CONSTRUCTION
# =============================================================================

def _double_bump(config: dict) -> DoubleBump:
    base = DoubleBump(
        E0=config['E0'], barrier_radius=config['BARRIER_RADIUS'],
        half_separation=config['HALF_SEPARATION'], tilt_eps=config['TILT_EPS'],
        tilt_profile=SmoothBump(config['TILT_INNER'], config['TILT_OUTER'], (0.0, 0.0)),
    )
    mode = config['ABSORPTION']
    if mode == 'none':
        return base
    if mode == 'pseudo_window':
        return base.with_changes(absorption=AbsorptionSpec(
            'pseudo_window', config['ABSORPTION_CENTER'], config['ABSORPTION_RADIUS'],
            config['ABSORPTION_STRENGTH']))

    # potential_window: a disc on the tilted return heteroclinic
    if base.tilt_eps <= 0:
        raise ValueError("ABSORPTION = potential_window needs TILT_EPS > 0")
    records = find_fixed_points(base, seed=config['SEED'])
    hyperbolic = sorted([r for r in records if r.hyperbolic], key=lambda r: r.z[0])
    if len(hyperbolic) < 2:
        raise ValueError("potential_window placement needs both fixed points")
    returns = heteroclinic_shoot(base, hyperbolic[-1], hyperbolic[0])
    if not returns:
        raise ValueError("no return heteroclinic to place the potential window on")
    window = place_potential_window(returns[0].trajectory, base.tilt_profile, config['ABSORPTION_STRENGTH'])
    print(f"    Potential window at {np.round(window.center, 6).tolist()} radius {window.radius:.6g}")
    return base.with_changes(absorption=window)


def _matrix_symbol(config: dict, n: int) -> MatrixSymbol:
    """The 2 x 2 symbol in n dimensions (1: the base symbol, 2: its extension)."""
    return MatrixSymbol(n=n, delta=config['DELTA'], eps=config['COUPLING_EPS'], lam=config['LAMBDA'])


def build_symbol(config: dict):
    """
    Build the scenario's scalar symbol (and the matrix symbol for 'matrix').

    Returns:
        (symbol, matrix) where matrix is None except for the matrix family
    """
    family = config['SYMBOL']
    if family == 'double_bump':
        return _double_bump(config), None
    if family == 'quartic':
        base = Quartic1D(f_amplitude=config['F_AMPLITUDE'], f_outer=config['F_OUTER'],
                         k_depth=config['K_DEPTH'], k_outer=config['K_OUTER'])
        chi = SmoothBump(config['CHI_INNER'], config['CHI_OUTER'])
        return Quartic2D(lam=config['LAMBDA'], base=base, chi=chi), None
    if family == 'matrix':
        matrix = _matrix_symbol(config, 1)
        return top_branch(matrix), matrix
    raise ValueError(f"Unknown SYMBOL '{family}'")


def _reference_cloud(ctx: RunContext) -> np.ndarray:
    """Fixed points plus the heteroclinic points known so far."""
    parts = [r.z[None, :] for r in ctx.hyperbolic]
    s = ctx.symbol
    if isinstance(s, DoubleBump):
        parts.append(s.axis_heteroclinic(+1))
        if s.absorption is None and s.tilt_eps == 0:
            parts.append(s.axis_heteroclinic(-1))
    for captures in ctx.captures.values():
        parts += [c.points(400) for c in captures]
    return np.vstack(parts) if parts else np.zeros((0, 2 * s.n))


# =============================================================================
# STAGES
# =============================================================================

def stage_fixed_points(ctx: RunContext):
    ctx.fixed_points = find_fixed_points(ctx.symbol, seed=ctx.seed)
    ctx.csv([record.as_row() for record in ctx.fixed_points], 'fixed_points.csv')
    print(f"    {len(ctx.fixed_points)} fixed points, {len(ctx.hyperbolic)} hyperbolic")


def stage_trapped_set(ctx: RunContext):
    s, config = ctx.symbol, ctx.config
    grid = ShellGrid.for_count(config['SHELL_SAMPLES'], s.support_radius,
                               directions=config.get('SHELL_DIRECTIONS', 16))
    ctx.trapped = sample_trapped_set(s, ctx.E0, grid, fixed_points=ctx.hyperbolic,
                                     horizon=config['HORIZON'], workers=ctx.workers)
    reference = _reference_cloud(ctx)
    distances = distance_to_set(ctx.trapped.points, reference)
    verdicts = [v.value for v in ctx.trapped.verdicts]
    ctx.csv(points_frame(ctx.trapped.points, verdict=verdicts, distance=distances), 'trapped_set.csv')

    trapped = np.array([v == 'trapped' for v in verdicts], dtype=bool)
    worst = float(distances[trapped].max()) if trapped.any() else 0.0
    inside_window = 0
    if s.absorption is not None:
        inside_window = int(sum(s.absorption.contains(z) for z in ctx.trapped.trapped))
    summary = {
        'energy': ctx.E0,
        'samples': int(len(ctx.trapped.points)),
        'counts': ctx.trapped.counts(),
        'max_trapped_distance': worst,
        'distance_tol': settings.TRAPPED_DISTANCE_TOL,
        'trapped_in_absorption_window': inside_window,
    }
    ctx.json(summary, 'trapped_set.json')
    if isinstance(s, DoubleBump):
        ctx.manifest.record_verdict('trapped_geometry',
                                    worst <= settings.TRAPPED_DISTANCE_TOL and inside_window == 0)
    print(f"    Verdicts: {summary['counts']}; max trapped distance {worst:.3e}")


def stage_heteroclinic(ctx: RunContext):
    rho1, rho2 = ctx.pair()
    ctx.captures = {
        'forward': heteroclinic_shoot(ctx.symbol, rho1, rho2),
        'backward': heteroclinic_shoot(ctx.symbol, rho2, rho1),
    }
    rows, frames = [], []
    for direction, captures in ctx.captures.items():
        for k, capture in enumerate(captures):
            rows.append({'direction': direction, 'index': k, **capture.as_row()})
            frames.append(points_frame(capture.points(), curve=f"{direction}_{k}"))
    ctx.csv(rows, 'heteroclinic_captures.csv',
            columns=['direction', 'index', 'theta', 'closest_distance', 'closest_time', 'energy_drift'])
    if frames:
        ctx.csv(pd.concat(frames, ignore_index=True), 'heteroclinics.csv')
    counts = {k: len(v) for k, v in ctx.captures.items()}
    ctx.json({'counts': counts, 'capture_radius': settings.CAPTURE_RADIUS}, 'heteroclinic.json')
    if ctx.symbol.absorption is not None:
        # the window sits on the return orbit, so nothing may come back
        ctx.manifest.record_verdict('absorbed_return', counts['backward'] == 0)
    print(f"    Captures: {counts}")


def stage_reversal(ctx: RunContext):
    rng = make_rng(ctx.seed, 3)
    grid = ShellGrid.for_count(64, ctx.symbol.support_radius)
    starts = shell_points(ctx.symbol, ctx.E0, grid)
    if len(starts) == 0:
        raise ValueError("no shell points for the reversal check")
    chosen = starts[rng.choice(len(starts), size=min(8, len(starts)), replace=False)]
    defects = [reversal_defect(ctx.symbol, z, 10.0) for z in chosen]
    ctx.csv(points_frame(chosen, defect=defects), 'reversal.csv')
    worst = float(max(defects))
    ctx.json({'starts': len(defects), 'T': 10.0, 'max_defect': worst, 'tol': 1e-6}, 'reversal.json')
    ctx.manifest.record_verdict('reversal', worst <= 1e-6)


def stage_scattering(ctx: RunContext):
    config = ctx.config
    barrier = RadialBarrier(config['E0'], config['BARRIER_RADIUS'], (0.0, 0.0))
    single = QuadraticForm(n=2, potential=barrier)
    R = config['BARRIER_RADIUS']
    impacts = np.linspace(-R, R, config.get('IMPACT_PARAMETERS', 41))
    report = scattering_deflection(single, 0.5 * config['E0'], impacts, horizon=config['HORIZON'])
    ctx.csv(report.as_rows(), 'scattering.csv')
    ctx.json({'trapped': report.trapped, 'fraction_large': report.fraction_large,
              'max_angle': report.max_angle, 'threshold': report.threshold}, 'scattering.json')
    ctx.manifest.record_verdict('scattering', report.max_angle >= report.threshold)


def stage_manifolds(ctx: RunContext):
    rho1, rho2 = ctx.pair()
    patch = AxisPatch(axis=0, level=0.5 * (rho1.z[0] + rho2.z[0]), center=0.0, half_width=0.25)
    summary = {'patch': {'axis': patch.axis, 'level': patch.level, 'half_width': patch.half_width}}
    try:
        outgoing = generating_function(ChartRequest(ctx.symbol, rho1, OUTGOING), patch)
        incoming = generating_function(ChartRequest(ctx.symbol, rho2, INCOMING), patch)
    except FoldDetected as e:
        print(f"    Fold detected: {e}")
        summary['fold'] = str(e)
        ctx.json(summary, 'manifolds.json')
        return
    ctx.csv(outgoing.as_rows() + incoming.as_rows(), 'manifold_charts.csv')
    mismatch = manifold_mismatch(outgoing, incoming)
    summary.update({
        'outgoing_shell_residual': outgoing.shell_residual,
        'incoming_shell_residual': incoming.shell_residual,
        'mismatch_sign_changes': int(np.sum(np.diff(np.sign(mismatch)) != 0)),
        'min_abs_mismatch': float(np.min(np.abs(mismatch))) if mismatch.size else None,
    })
    ctx.json(summary, 'manifolds.json')


def stage_escape(ctx: RunContext):
    s, config = ctx.symbol, ctx.config
    rho1, rho2 = ctx.pair()
    captures = ctx.captures.get('forward') or heteroclinic_shoot(s, rho1, rho2)
    trapped = ctx.trapped.trapped if ctx.trapped is not None else None
    assembly = build_assembly(s, rho1, rho2, captures, trapped_points=trapped)
    print(f"    eps = {assembly.eps_ball:.6g}, T = {assembly.T_transport:.6g}, C2 = {assembly.C2:g}")

    samples = shell_samples(s, ctx.E0, config['ENERGY_WINDOW'], config['SHELL_SAMPLES'], ctx.seed,
                            anchors=_reference_cloud(ctx))
    G = assemble_G(assembly, s, samples, strict=False, workers=ctx.workers)
    report = G.assembly.outer.margin_report
    confinement = confinement_report(G.assembly, s, seed=ctx.seed, workers=ctx.workers)
    identities = identity_report(G.assembly, s)

    ctx.csv(report.as_rows(), 'escape_margin.csv')
    ctx.csv(confinement.as_rows(), 'escape_confinement.csv')
    ctx.json({'assembly': G.assembly.as_dict(), 'margin': report.as_dict(),
              'confinement': confinement.as_dict(), 'identities': identities.as_dict()}, 'escape.json')
    ctx.manifest.record_verdict('escape', report.passed)
    ctx.manifest.record_verdict('escape_confinement', not confinement.parameter_failure)
    ctx.manifest.record_verdict('escape_identities', identities.passed)
    print(f"    Margin: min ratio {report.min_ratio:.6g}, {len(report.failures)} failures, nu = {G.nu:g}")
    print(f"    Identities: F spread {identities.F_spread:.3g}, bracket residual {identities.bracket_residual:.3g}")


def stage_quartic_escape(ctx: RunContext):
    config = ctx.config
    lam = config['LAMBDA']
    report = verify_quartic_escape(ctx.symbol, lam, config['WINDOW_INNER'], config['WINDOW_OUTER'],
                                   count=config['SHELL_SAMPLES'], seed=ctx.seed,
                                   radius=config['COMPACT_RADIUS'])
    ctx.csv(report.as_rows(), 'quartic_margin.csv')
    ctx.json({'margin': report.as_dict(), 'factor_values': quartic_factor_values(lam),
              'floor': fit_quartic_floor(lam, config['WINDOW_INNER'])}, 'quartic_escape.json')
    ctx.manifest.record_verdict('quartic_escape', report.passed)
    print(f"    Quartic margin: min ratio {report.min_ratio:.6g}, {len(report.failures)} failures")


def stage_convexity(ctx: RunContext):
    config = ctx.config
    rng = make_rng(ctx.seed, 4)
    starts = shell_points(ctx.symbol, ctx.E0, ShellGrid.for_count(4 * config['CONVEXITY_STARTS'], 2.5))
    if len(starts) == 0:
        raise ValueError("no shell points for the convexity check")
    chosen = starts[rng.choice(len(starts), size=min(config['CONVEXITY_STARTS'], len(starts)), replace=False)]
    report = convexity_check(ctx.symbol, chosen, config['CONVEXITY_TIME'])
    ctx.json({'starts': report.starts, 'violations': report.violations,
              'min_second_difference': report.min_second_difference}, 'convexity.json')
    ctx.manifest.record_verdict('convexity', report.violations == 0)


def stage_matrix_surface(ctx: RunContext):
    config = ctx.config
    curves = matrix_energy_surface(ctx.matrix, tuple(config['SURFACE_WINDOW']), config['SURFACE_RESOLUTION'])
    frames = [pd.DataFrame({'curve': k, 'x': c[:, 0], 'xi': c[:, 1]}) for k, c in enumerate(curves)]
    if frames:
        ctx.csv(pd.concat(frames, ignore_index=True), 'matrix_surface.csv')
    gap = avoided_crossing_gap(ctx.matrix)
    ctx.json({'branches': len(curves), 'avoided_crossing_gap': gap, 'coupling_eps': ctx.matrix.eps},
             'matrix_surface.json')
    print(f"    {len(curves)} surface branches, avoided-crossing gap {gap:.6g}")


def stage_matrix_escape(ctx: RunContext):
    config = ctx.config
    extension = _matrix_symbol(config, 2)
    report = verify_matrix_escape(extension, config['ESCAPE_DELTA'], count=config['SHELL_SAMPLES'],
                                  seed=ctx.seed, workers=ctx.workers)
    ctx.csv(report.as_rows(), 'matrix_margin.csv')
    ctx.json({'margin': report.as_dict()}, 'matrix_escape.json')
    ctx.manifest.record_verdict('matrix_escape', report.passed)
    print(f"    Matrix margin: min {np.min(report.values) if len(report.values) else np.nan:.6g}, "
          f"{len(report.failures)} failures")


def _phase_model(ctx: RunContext) -> PhaseModel:
    config = ctx.config
    d = float(config['D'])
    nu = float(config['PHASE_NU'])
    g = None
    if d < 2.0:
        # D = 1: the fiber is the single point x~2 = 0
        K = point_set(config['CANTOR_DEPTH']) if d == 1.0 else cantor_build(d - 1.0, config['CANTOR_DEPTH'])
        g = zero_set_function(K, 1.0 / config['FRACTAL_RES_DIVISOR'])
    return PhaseModel(E0=ctx.E0, nu=nu, alpha=settings.PHASE_ALPHA, g=g)


def stage_fractal(ctx: RunContext):
    config = ctx.config
    model = _phase_model(ctx)
    ctx.phase_model = model
    nu = model.nu
    res = nu / config['FRACTAL_RES_DIVISOR']

    phase_build(model)
    pullback_potential(model)
    signs = sign_structure_check(model)
    fiber = heteroclinic_extract(model, res=res, workers=ctx.workers)
    if fiber.size == 0:
        raise ValueError("empty heteroclinic fiber")
    ctx.csv(pd.DataFrame({'x2': fiber}), 'fiber.csv')

    # sheet length: the fiber extent, at least nu/2
    extent = max(float(fiber.max() - fiber.min()), 0.5 * nu)
    x1_range = (model.root_nu, model.root_nu + extent)
    if model.g is None:
        # filled sheet: x~1 at the fiber step, boxes tiling the sheet exactly
        count = max(2, int(round(extent / res)) + 1)
        finest, snap = 4.0 * res, True
    else:
        count = int(min(512, max(2, round(extent / res) + 1)))
        finest, snap = 4.0 * max(res, extent / (count - 1)), False
    cloud = product_cloud(fiber, x1_range, count)
    ladder = scale_ladder(cloud, config['BOX_SCALES'], finest=finest, snap=snap)
    report = box_dimension(cloud, ladder, workers=ctx.workers)
    stride = max(1, int(np.ceil(len(cloud) / settings.CLOUD_CSV_ROWS)))
    ctx.csv(pd.DataFrame(cloud[::stride], columns=['x1', 'x2']), 'heteroclinic_cloud.csv')
    ctx.csv(report.as_rows(), 'box_counts.csv')

    d = float(config['D'])
    tol = dimension_tolerance(d)
    summary = {'target_dim': d, 'dimension_tol': tol, 'dimension': report.as_dict(),
               'sign_structure': signs.as_dict(),
               'fiber_points': int(fiber.size), 'res': res, 'x1_range': list(x1_range),
               'cloud_rows': int(len(cloud)), 'cloud_csv_stride': stride,
               'model': model.parameters()}
    if model.g is not None:
        summary['hausdorff_to_nuK'] = model.g.hausdorff_to_K(fiber, nu)
        summary['cantor'] = model.g.K.as_dict()
        summary['cantor_calibration'] = box_dimension(model.g.K.realized_points).fitted_dim
    ctx.json(summary, 'fractal.json')
    ctx.manifest.record_verdict('fractal_dimension', abs(report.fitted_dim - d) <= tol)
    ctx.manifest.record_verdict('sign_structure', signs.passed)
    print(f"    Fitted dimension {report.fitted_dim:.4f} (target {d:g}), fiber {fiber.size} points")


def stage_scaling(ctx: RunContext):
    model = ctx.phase_model or _phase_model(ctx)
    report = derivative_scaling(model, tuple(ctx.config['NU_LADDER']))
    ctx.csv(report.as_rows(), 'scaling.csv')
    ctx.json(report.as_dict(), 'scaling.json')
    ctx.manifest.record_verdict('scaling', report.passed)
    print(f"    Exponents {np.round(report.exponents, 4).tolist()} (expected {list(report.expected)})")


def _gronwall_starts(s: DoubleBump, nu: float, count: int) -> np.ndarray:
    """Points of gamma_1 just before the pullback support, shifted across [-nu, nu] in x_2."""
    axis = s.axis_heteroclinic(+1, count=801)
    before = axis[(axis[:, 0] > -0.6) & (axis[:, 0] < -0.2)]
    picks = before[np.linspace(0, len(before) - 1, count).astype(int)].copy()
    picks[:, 1] = np.linspace(-nu, nu, count)
    return picks


def stage_gronwall(ctx: RunContext):
    config = ctx.config
    model = ctx.phase_model or _phase_model(ctx)
    s = ctx.symbol
    if not isinstance(s, DoubleBump):
        raise ValueError("the Groenwall check runs on the double-bump symbol")
    rows, separations = [], []
    for nu in (model.nu, 0.5 * model.nu):
        perturbed = embed_phase_model(s, model.with_nu(nu))
        starts = _gronwall_starts(s, nu, config['GRONWALL_STARTS'])
        report = gronwall_check(s, perturbed, starts, nu, config['GRONWALL_TIME'], workers=ctx.workers)
        rows.append(report.as_dict())
        separations.append(report.max_separation)
    ctx.csv([{k: v for k, v in row.items() if k != 'excluded'} for row in rows], 'gronwall.csv')
    ratio = separations[0] / separations[1] if separations[1] > 0 else np.inf
    ctx.json({'reports': rows, 'separation_ratio': ratio, 'expected_ratio': float(np.sqrt(2.0))},
             'gronwall.json')
    ctx.manifest.record_verdict('gronwall', all(row['violations'] == 0 for row in rows))
    print(f"    Max separations {[f'{v:.3e}' for v in separations]}, ratio {ratio:.4f}")


def stage_degree(ctx: RunContext):
    config = ctx.config
    rho1, rho2 = ctx.pair()
    report = degree_diagnostic(ctx.symbol, rho2, rho1.z[:2], config['DEGREE_EPS'],
                               config['DEGREE_TIMES'], config['DEGREE_LAUNCHES'], workers=ctx.workers)
    ctx.csv(report.as_rows(), 'degree.csv')
    ctx.json({'eps': report.eps, 'windings': report.windings, 'obstructed': report.obstructed},
             'degree.json')
    ctx.manifest.record_verdict('degree', bool(report.windings) and report.windings[0] == 1)
    print(f"    Windings: {report.windings}")


STAGES: Dict[str, Callable[[RunContext], None]] = {
    'fixed_points': stage_fixed_points,
    'trapped_set': stage_trapped_set,
    'heteroclinic': stage_heteroclinic,
    'manifolds': stage_manifolds,
    'reversal': stage_reversal,
    'scattering': stage_scattering,
    'escape': stage_escape,
    'quartic_escape': stage_quartic_escape,
    'convexity': stage_convexity,
    'matrix_surface': stage_matrix_surface,
    'matrix_escape': stage_matrix_escape,
    'fractal': stage_fractal,
    'scaling': stage_scaling,
    'gronwall': stage_gronwall,
    'degree': stage_degree,
}


def make_run_dir(config: dict, base_dir: Optional[str] = None) -> str:
    """<OUTPUT_DIR>/<scenario>_seed<SEED>; reruns overwrite the same directory."""
    base_dir = base_dir or settings.OUTPUT_DIR
    run_dir = os.path.join(base_dir, f"{config['scenario_name']}_seed{config['SEED']}")
    os.makedirs(run_dir, exist_ok=True)
    return run_dir


def run_scenario(config: dict, run_dir: Optional[str] = None) -> RunManifest:
    """
    Run every stage of a scenario and write the manifest.

    A failing stage is recorded and stops the run; the reports already
    written stay in place.

    Args:
        config: Validated scenario dictionary
        run_dir: Output directory (default: make_run_dir(config))

    Returns:
        RunManifest (exit_code 0, 1 or 2)
    """
    run_dir = run_dir or make_run_dir(config)
    manifest = RunManifest(run_dir=run_dir, config=config)
    ctx = RunContext(config=config, run_dir=run_dir, manifest=manifest)
    ctx.json(config, 'config.json')

    print("\n[Step 1] Building symbol...")
    try:
        ctx.symbol, ctx.matrix = build_symbol(config)
    except Exception as e:
        print(f"Error in symbol build: {e}")
        manifest.record_failure('symbol', e)
        manifest.write()
        return manifest

    stages: List[str] = list(config.get('STAGES', ()))
    for step, stage in enumerate(stages, start=2):
        print(f"\n[Step {step}] {stage.replace('_', ' ').capitalize()}...")
        started = time.perf_counter()
        try:
            STAGES[stage](ctx)
        except Exception as e:
            print(f"Error in {stage}: {e}")
            manifest.record_failure(stage, e)
            break
        finally:
            manifest.record_stage(stage, time.perf_counter() - started)

    manifest.write()
    return manifest
