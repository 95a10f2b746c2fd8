"""
Trapscape - Main Entry Point
============================
Command-line front end for the trapped-set and escape-function pipeline.

Commands:
1. run <config>      Build the scenario's symbol, run its stages, write the
                     reports and the manifest into <OUTPUT_DIR>/<scenario>_seed<SEED>
2. render <run-dir>  SVG figures from the reports of a finished run
3. verify <run-dir>  Re-check the run's invariants from its files alone

Usage:
    python main.py run config_files/double_bump.yaml
    python main.py render output/double_bump_seed20240601
    python main.py verify output/double_bump_seed20240601

Exit codes:
    0  every stage ran and every check passed
    2  a verification check failed
    1  a stage or the command itself failed

Configuration:
    Edit config/settings.py for tolerances and paths; scenario parameters
    live in config/scenarios.py and are overridden by the scenario file.
"""

import argparse
import os
import sys
import time

# Add current directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import settings  # noqa: E402
from config.scenarios import build_scenario_config, generate_scenario_sets  # noqa: E402
from pipeline import MissingReportError, make_run_dir, render_run, run_scenario, verify_run  # noqa: E402


def _banner(title: str):
    print("=" * 70)
    print(title)
    print("=" * 70)


def command_run(config_path: str, output_dir: str = None) -> int:
    _banner("TRAPSCAPE RUN")
    try:
        config = build_scenario_config(config_path)
    except (OSError, ValueError) as e:
        print(f"Error loading scenario: {e}")
        return 1
    settings.ensure_directories()

    print(f"\nScenario: {config['scenario_name']}")
    print(f"Symbol: {config['SYMBOL']}")
    print(f"Seed: {config['SEED']}")
    print(f"Stages: {', '.join(config['STAGES'])}")

    exit_code = 0
    for scenario in generate_scenario_sets(config):
        started = time.perf_counter()
        manifest = run_scenario(scenario, make_run_dir(scenario, output_dir))
        print(f"\n  {scenario['scenario_name']}: exit code {manifest.exit_code} "
              f"({time.perf_counter() - started:.1f} s)")
        for name, passed in sorted(manifest.verdicts.items()):
            print(f"    {name}: {'ok' if passed else 'FAILED'}")
        for stage, error in manifest.failures.items():
            print(f"    {stage} failed: {error}")
        codes = (exit_code, manifest.exit_code)
        exit_code = 1 if 1 in codes else max(codes)

    print("\n" + "=" * 70)
    print("RUN COMPLETE" if exit_code == 0 else f"RUN FINISHED WITH EXIT CODE {exit_code}")
    print("=" * 70)
    return exit_code


def command_render(run_dir: str) -> int:
    _banner("TRAPSCAPE RENDER")
    try:
        written = render_run(run_dir)
    except MissingReportError as e:
        print(f"Error: {e}")
        return 1
    print(f"\n  {len(written)} figures written")
    return 0


def command_verify(run_dir: str) -> int:
    _banner("TRAPSCAPE VERIFY")
    try:
        result = verify_run(run_dir)
    except MissingReportError as e:
        print(f"Error: {e}")
        return 1
    print("\n" + "=" * 70)
    print("VERIFICATION PASSED" if result.passed else "VERIFICATION FAILED")
    print("=" * 70)
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='trapscape',
                                     description='Trapped sets and escape functions of Hamiltonian flows')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run a scenario file')
    run.add_argument('config', help='YAML scenario file')
    run.add_argument('--output-dir', default=None, help=f"parent of the run directory (default {settings.OUTPUT_DIR})")

    render = commands.add_parser('render', help='write SVG figures for a run directory')
    render.add_argument('run_dir')

    verify = commands.add_parser('verify', help='re-check a run directory from its files')
    verify.add_argument('run_dir')
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == 'run':
        return command_run(args.config, args.output_dir)
    if args.command == 'render':
        return command_render(args.run_dir)
    return command_verify(args.run_dir)


if __name__ == "__main__":
    sys.exit(main())
