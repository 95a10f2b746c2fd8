"""
Pipeline Package
================
Scenario orchestration and the file-based re-check of finished runs.

Modules:
- runner: symbol build, stages and the run manifest
- verify: duckdb re-checks and SVG rendering of a run directory
"""

from pipeline.runner import STAGES, RunContext, build_symbol, make_run_dir, run_scenario
from pipeline.verify import MissingReportError, VerificationResult, render_run, verify_run

__all__ = [
    'STAGES', 'RunContext', 'build_symbol', 'make_run_dir', 'run_scenario',
    'MissingReportError', 'VerificationResult', 'render_run', 'verify_run',
]
