"""Command-line entry point: ``stepcarnot <kind> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import KINDS, ConfigError, load_config, parse_override
from .experiments import run_experiment
from .io import emit


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepcarnot",
        description="Simulate discrete isothermal processes and stepwise Carnot-like engines.",
    )
    sub = parser.add_subparsers(dest="kind", required=True, metavar="KIND")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        p.add_argument("--config", help="flat TOML run configuration")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--mode", choices=("exact", "dynamics"))
        p.add_argument("--seed", type=int)
        p.add_argument("--on-error", choices=("fail-fast", "collect-errors"))
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override any config key (TOML value syntax); repeatable",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        overrides = dict(parse_override(item) for item in args.set)
        overrides["kind"] = args.kind
        for key in ("out", "format", "mode", "seed", "on_error"):
            value = getattr(args, key)
            if value is not None:
                overrides[key] = value
        cfg = load_config(args.config, overrides)
        rows = run_experiment(cfg)
        emit(rows, cfg.format, cfg.out)
    except (ConfigError, OSError) as exc:
        print(f"stepcarnot: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"stepcarnot: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
