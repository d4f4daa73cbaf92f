"""Command-line entry point.

Subcommands mirror the run modes: simulate, bisect, sweep, steady, limits.
Exit codes: 0 success, 2 validation problem, 3 numerical failure, 4 oracle
violation.  Any failure also leaves a machine-readable ``error.json`` in the
output directory.
"""

from __future__ import annotations

import argparse
import sys

from .config import MODES, load_config
from .errors import OracleError, SolverError, StefanPPError, ValidationError
from .runner import resolve_out_dir, run, write_error_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_ORACLE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stefanpp",
        description="Simulate, classify, and bracket a two-front Stefan predator-prey system.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode, help=f"run a {mode} job")
        sp.add_argument("--config", required=True, help="path to the YAML run configuration")
        sp.add_argument("--out", default=None, help="output directory (overrides outputs.directory)")
        sp.add_argument("--workers", type=int, default=None, help="sweep worker count override")
        sp.add_argument(
            "--seedless",
            action="store_true",
            help="reject any nondeterministic default (timestamped dirs, auto workers)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except StefanPPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if config.mode != args.mode and config.mode != "simulate":
        print(
            f"error: config declares mode {config.mode!r} but the {args.mode!r} "
            "subcommand was invoked",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    if config.mode != args.mode:
        from dataclasses import replace

        config = replace(config, mode=args.mode)

    try:
        out_dir = run(config, out_dir=args.out, workers=args.workers, seedless=args.seedless)
        print(f"artifacts written to {out_dir}")
        return EXIT_OK
    except StefanPPError as exc:
        try:
            target = resolve_out_dir(config, args.out, seedless=False)
            write_error_json(target, exc)
        except StefanPPError:
            pass
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, OracleError):
            return EXIT_ORACLE
        if isinstance(exc, SolverError):
            return EXIT_SOLVER
        if isinstance(exc, ValidationError):
            return EXIT_VALIDATION
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
