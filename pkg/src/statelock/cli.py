"""Command-line front end: run experiments, validate invariants, show schemas.

Exit codes: 0 success; 1 validation failure; 2 configuration error;
3 numerical or runtime failure inside an experiment.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    EXPERIMENTS,
    SCHEMAS,
    ConfigError,
    load_config,
    run_experiment,
    validate_suite,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statelock",
        description="State-locked halting protocol: experiments and validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write CSV")
    p_run.add_argument("config", help="flat key = value config file")
    p_run.add_argument(
        "--set", dest="overrides", action="append", default=[],
        metavar="KEY=VALUE", help="override a config key",
    )

    p_val = sub.add_parser("validate", help="run the invariant suite")
    p_val.add_argument("--full", action="store_true",
                       help="include the wave-packet cross-checks")

    p_schema = sub.add_parser("schema", help="print an experiment's CSV columns")
    p_schema.add_argument("experiment", choices=sorted(EXPERIMENTS))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(",".join(SCHEMAS[args.experiment]))
        return 0
    if args.command == "validate":
        report = validate_suite("full" if args.full else "fast")
        print(report.render())
        return 0 if report.passed else 1
    # run
    try:
        cfg = load_config(args.config, args.overrides)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        run_experiment(cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"experiment failed ({cfg.experiment}): {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
