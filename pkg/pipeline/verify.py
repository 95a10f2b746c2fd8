"""
Run Verification and Rendering
==============================
Works from a finished run directory alone: re-checks the recorded
invariants with duckdb queries over the emitted CSVs, and renders the SVG
figures.

This module handles:
- Artifact hashes against the manifest
- Trapped-cloud distance, margin positivity and dimension-window checks
- The transport identities recorded by the escape stage
- Figure rendering for every completed stage
"""

import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import pandas as pd

from config import settings
from export import (
    MANIFEST_NAME,
    get_dimension_order_query,
    get_dimension_window_query,
    get_fiber_summary_query,
    get_margin_summary_query,
    get_trapped_summary_query,
    hash_mismatches,
    load_manifest,
    plot_curves,
    plot_dimension_fit,
    plot_margin_heatmap,
    plot_trapped_cloud,
    read_json,
    run_query,
)
from fractal import dimension_tolerance


class MissingReportError(Exception):
    """A report needed by render or verify is absent from the run directory."""

    def __init__(self, run_dir: str, name: str):
        super().__init__(f"missing report '{name}' in {run_dir}")
        self.run_dir = run_dir
        self.name = name


def _require(run_dir: str, name: str) -> str:
    path = os.path.join(run_dir, name)
    if not os.path.exists(path):
        raise MissingReportError(run_dir, name)
    return path


def _completed_stages(manifest: dict) -> List[str]:
    """Stages that ran to the end (timed and not failed), in run order."""
    failed = set(manifest.get('failures', {}))
    stages = manifest.get('config', {}).get('STAGES', [])
    return [s for s in stages if s in manifest.get('stage_times', {}) and s not in failed]


# =============================================================================
# VERIFY
# =============================================================================

@dataclass
class VerificationResult:
    """Named checks re-derived from the files of a run."""

    run_dir: str
    checks: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, dict] = field(default_factory=dict)

    def record(self, name: str, passed: bool, **details):
        self.checks[name] = bool(passed)
        self.details[name] = details
        status = 'ok' if passed else 'FAILED'
        print(f"    {name}: {status}")

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 2


def _first_row(frame: pd.DataFrame) -> dict:
    return frame.iloc[0].to_dict() if len(frame) else {}


def _check_trapped(run_dir: str, result: VerificationResult):
    path = _require(run_dir, 'trapped_set.csv')
    summary = run_query(get_trapped_summary_query(path))
    trapped = summary[summary['verdict'] == 'trapped']
    worst = float(trapped['max_distance'].iloc[0]) if len(trapped) else 0.0
    result.record('trapped_distance', worst <= settings.TRAPPED_DISTANCE_TOL,
                  max_distance=worst, tol=settings.TRAPPED_DISTANCE_TOL,
                  verdicts=dict(zip(summary['verdict'], summary['samples'].astype(int))))


def _check_margin(run_dir: str, name: str, result: VerificationResult):
    path = _require(run_dir, name)
    row = _first_row(run_query(get_margin_summary_query(path)))
    failures = int(row.get('failures') or 0)
    result.record(f"margin:{name}", failures == 0 and int(row.get('samples') or 0) > 0,
                  samples=int(row.get('samples') or 0), failures=failures,
                  min_ratio=row.get('min_ratio'))


def _check_dimension(run_dir: str, config: dict, result: VerificationResult):
    counts = _require(run_dir, 'box_counts.csv')
    summary = read_json(_require(run_dir, 'fractal.json'))
    disorder = run_query(get_dimension_order_query(counts))
    window = _first_row(run_query(get_dimension_window_query(counts)))
    fiber = _first_row(run_query(get_fiber_summary_query(_require(run_dir, 'fiber.csv'))))

    result.record('box_counts_monotone', len(disorder) == 0, inversions=int(len(disorder)))
    result.record('dimension_window', int(window.get('window_scales') or 0) >= 3,
                  window_scales=int(window.get('window_scales') or 0))
    fitted = summary['dimension']['fitted_dim']
    target = float(config['D'])
    tol = dimension_tolerance(target)
    result.record('dimension_target', abs(fitted - target) <= tol, fitted=fitted, target=target, tol=tol)
    result.record('fiber_nonempty', int(fiber.get('points') or 0) > 0, points=int(fiber.get('points') or 0))


def _check_identities(run_dir: str, result: VerificationResult):
    identities = read_json(_require(run_dir, 'escape.json'))['identities']
    worst = max(identities['F_spread'], identities['g1_mismatch'], identities['g2_mismatch'],
                identities['bracket_residual'])
    result.record('escape_identities', worst <= identities['tol'], worst=worst, tol=identities['tol'],
                  lines=identities['lines'])


MARGIN_REPORTS = {
    'escape': 'escape_margin.csv',
    'quartic_escape': 'quartic_margin.csv',
    'matrix_escape': 'matrix_margin.csv',
}


def verify_run(run_dir: str) -> VerificationResult:
    """
    Re-check a run directory from its files.

    Args:
        run_dir: Directory written by run_scenario

    Returns:
        VerificationResult (exit_code 0 or 2)

    Raises:
        MissingReportError: manifest or a report of a completed stage is absent
    """
    _require(run_dir, MANIFEST_NAME)
    manifest = load_manifest(run_dir)
    config = manifest.get('config', {})
    result = VerificationResult(run_dir)

    bad = hash_mismatches(run_dir, manifest)
    result.record('artifact_hashes', not bad, mismatched=bad)

    for stage in _completed_stages(manifest):
        if stage == 'trapped_set' and config.get('SYMBOL') == 'double_bump':
            _check_trapped(run_dir, result)
        elif stage in MARGIN_REPORTS:
            _check_margin(run_dir, MARGIN_REPORTS[stage], result)
            if stage == 'escape':
                _check_identities(run_dir, result)
        elif stage == 'fractal':
            _check_dimension(run_dir, config, result)
    return result


# =============================================================================
# RENDER
# =============================================================================

def _render_trapped(run_dir: str, out: str) -> str:
    frame = pd.read_csv(_require(run_dir, 'trapped_set.csv'))
    return plot_trapped_cloud(frame, os.path.join(out, 'trapped_cloud.svg'))


def _render_heteroclinics(run_dir: str, out: str) -> Optional[str]:
    captures = read_json(_require(run_dir, 'heteroclinic.json'))
    if not sum(captures['counts'].values()):
        return None
    frame = pd.read_csv(_require(run_dir, 'heteroclinics.csv'))
    x, y = ('x1', 'x2') if 'x2' in frame else ('x1', 'xi1')
    return plot_curves(frame, os.path.join(out, 'heteroclinics.svg'), x, y, 'Heteroclinic orbits')


def _render_surface(run_dir: str, out: str) -> Optional[str]:
    if not read_json(_require(run_dir, 'matrix_surface.json'))['branches']:
        return None
    frame = pd.read_csv(_require(run_dir, 'matrix_surface.csv'))
    return plot_curves(frame, os.path.join(out, 'energy_surface.svg'), 'x', 'xi', 'Energy surface det p = 0')


def _margin_renderer(name: str) -> Callable[[str, str], str]:
    def render(run_dir: str, out: str) -> str:
        frame = pd.read_csv(_require(run_dir, name))
        target = os.path.join(out, name.replace('.csv', '.svg'))
        return plot_margin_heatmap(frame, target, title=name.replace('_', ' ').replace('.csv', ''))
    return render


def _render_dimension(run_dir: str, out: str) -> str:
    frame = pd.read_csv(_require(run_dir, 'box_counts.csv'))
    summary = read_json(_require(run_dir, 'fractal.json'))
    fitted = summary['dimension']['fitted_dim']
    title = f"Box counting (target {summary['target_dim']:g})"
    return plot_dimension_fit(frame, fitted, os.path.join(out, 'dimension_fit.svg'), title=title)


RENDERERS: Dict[str, Callable[[str, str], Optional[str]]] = {
    'trapped_set': _render_trapped,
    'heteroclinic': _render_heteroclinics,
    'matrix_surface': _render_surface,
    'escape': _margin_renderer('escape_margin.csv'),
    'quartic_escape': _margin_renderer('quartic_margin.csv'),
    'matrix_escape': _margin_renderer('matrix_margin.csv'),
    'fractal': _render_dimension,
}


def render_run(run_dir: str, out_dir: Optional[str] = None) -> List[str]:
    """
    Write SVG figures for every completed stage that has one.

    Args:
        run_dir: Directory written by run_scenario
        out_dir: Figure directory (default: <run_dir>/figures)

    Returns:
        Paths of the written figures

    Raises:
        MissingReportError: manifest or a needed report is absent
    """
    _require(run_dir, MANIFEST_NAME)
    manifest = load_manifest(run_dir)
    out_dir = out_dir or os.path.join(run_dir, settings.FIGURES_SUBDIR)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for stage in _completed_stages(manifest):
        renderer = RENDERERS.get(stage)
        if renderer is None:
            continue
        path = renderer(run_dir, out_dir)
        if path:
            written.append(path)
    return written
