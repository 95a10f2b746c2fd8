"""
Escape Function Gluing
======================
Tunes the gluing weight nu of G = nu psi_0 G_0 + G_inf until the escape
inequality holds on the shell samples.

H_p G is linear in nu, so the brackets of psi_0 G_0 and G_inf are swept
once per taper and every nu is scored from them. nu is halved from 1 down
to NU_MIN; when no value passes the taper of G_inf is shrunk and the scan
repeated, up to TAPER_RETRIES times.
"""

from dataclasses import replace
from typing import Optional

import numpy as np

from config import settings
from escape.assembly import ConstructionError, EscapeAssembly, EscapeFunction
from escape.verify import MarginReport, escape_bracket_parts, scalar_margin, split_absorbed


def _score(report: MarginReport) -> float:
    return report.min_ratio if np.isfinite(report.min_ratio) else -np.inf


def nu_ladder() -> np.ndarray:
    """1, 1/2, 1/4, ... down to NU_MIN, at most NU_BISECTIONS + 1 values."""
    ladder = 0.5 ** np.arange(settings.NU_BISECTIONS + 1)
    return ladder[ladder >= settings.NU_MIN]


def assemble_G(assembly: EscapeAssembly, s, shell_samples: np.ndarray,
               reference_set: Optional[np.ndarray] = None, strict: bool = True,
               floor_tol: float = settings.FLOOR_TOL, workers: Optional[int] = None) -> EscapeFunction:
    """
    Glue G = nu psi_0 G_0 + G_inf with the largest passing nu.

    Args:
        assembly: EscapeAssembly from build_assembly
        s: Scalar symbol
        shell_samples: Verification samples of the energy shell
        reference_set: Distance reference (default: rho_1 and rho_2)
        strict: Raise when nothing passes; otherwise return the best attempt
        floor_tol: Denominators min(dist^2, 1) at or below this are not used
        workers: Process count

    Returns:
        EscapeFunction whose assembly carries nu_glue and the margin report

    Raises:
        ConstructionError: strict and no (nu, taper) pair passes; carries the worst sample
    """
    samples, excluded = split_absorbed(s, shell_samples)
    if reference_set is None:
        reference_set = np.vstack([assembly.rho1.z, assembly.rho2.z])
    reference_set = np.atleast_2d(reference_set)

    glued, _ = escape_bracket_parts(EscapeFunction(assembly, s), samples, workers)
    best = None
    attempt = assembly
    for retry in range(settings.TAPER_RETRIES + 1):
        if retry:
            attempt = replace(attempt, outer=attempt.outer.shrink(0.5))
        _, outer = escape_bracket_parts(EscapeFunction(attempt, s), samples, workers)
        for nu in nu_ladder():
            report = scalar_margin(samples, nu * glued + outer, reference_set, floor_tol, excluded,
                                   parameters={'nu': float(nu), 'C2': attempt.C2,
                                               'eps_ball': attempt.eps_ball,
                                               'taper_outer': attempt.outer.outer})
            trial = replace(attempt, nu_glue=float(nu))
            if best is None or _score(report) > _score(best[0]):
                best = (report, trial)
            if report.passed:
                return EscapeFunction(replace(trial, outer=replace(trial.outer, margin_report=report)), s)
        print(f"    No nu in [{settings.NU_MIN:g}, 1] passes (best min ratio {_score(best[0]):.6g}); "
              f"shrinking the taper")

    report, trial = best
    if strict:
        raise ConstructionError(
            f"no nu in [{settings.NU_MIN:g}, 1] passes after {settings.TAPER_RETRIES} taper retries "
            f"(best min ratio {_score(report):.6g})",
            worst_sample=report.worst_sample, report=report,
        )
    return EscapeFunction(replace(trial, outer=replace(trial.outer, margin_report=report)), s)
