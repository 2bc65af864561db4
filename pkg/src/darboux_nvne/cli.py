"""Command-line entry point.

    darboux-nvne run <config.yaml>        full pipeline: CSV time series + report
    darboux-nvne verify <config.yaml>     checks only: report
    darboux-nvne export-examples <dir>    write the bundled example configs

Exit status: 0 if every requested check passes, 1 if any fails, 2 for
configuration or precondition errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import BUNDLED_EXAMPLES, ConfigError, dump_example, load_config
from .matrix_core import ValidationError
from .models import DegenerateVelocityError
from .scenario import run_scenario, write_artifacts
from .seeds import SeedError, TrivialDarbouxError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


def _seed_field(exc: Exception) -> str:
    return "seed.beta" if isinstance(exc, TrivialDarbouxError) else "seed"


def _execute(config_path: str, timeseries: bool) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_scenario(cfg)
    except SeedError as exc:
        print(f"config error: {_seed_field(exc)}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, DegenerateVelocityError, ValueError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = write_artifacts(result, timeseries=timeseries)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(result.report.summary())
    for kind, p in paths.items():
        print(f"wrote {kind}: {p}")
    if not result.report.all_passed:
        print(f"FAILED checks: {', '.join(result.report.failed())}; see {paths['report']}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _export_examples(directory: str) -> int:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name in BUNDLED_EXAMPLES:
        p = out / f"{name}.yaml"
        p.write_text(dump_example(name))
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="darboux-nvne", description="Darboux soliton solutions of i drho/dt = [H, f(rho)].")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="build, verify and export a scenario")
    p.add_argument("config")
    p = sub.add_parser("verify", help="run the configured checks and write the report only")
    p.add_argument("config")
    p = sub.add_parser("export-examples", help="write the bundled example configs")
    p.add_argument("directory")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "export-examples":
        return _export_examples(args.directory)
    return _execute(args.config, timeseries=args.command == "run")


if __name__ == "__main__":
    sys.exit(main())
