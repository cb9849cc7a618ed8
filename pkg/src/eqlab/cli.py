"""Command line entry point.

Usage::

    eqlab <subcommand> --config <file> [--seed <u64>] [--workers N]
          [--out DIR] [--no-plots]

The config file is a strict JSON document; unknown keys are rejected
with their path.  The exit code is 0 exactly when every in-config
acceptance check passes.  Re-running any config with the same seed
produces byte-identical CSV tables regardless of the worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import SCHEMAS, ExperimentConfig, SchemaError, run_experiment
from .reports import write_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqlab",
        description="equidistribution experiments on projective spaces",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SCHEMAS:
        sp = sub.add_parser(name, help=f"run a '{name}' experiment")
        sp.add_argument("--config", required=True, help="strict JSON config file")
        sp.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        sp.add_argument("--workers", type=int, default=None, help="parallel worker count")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--no-plots", action="store_true", help="suppress SVG plots")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as e:
        print(f"error: config is not valid JSON: {e}", file=sys.stderr)
        return 2
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.workers is not None:
        doc["workers"] = args.workers
    try:
        cfg = ExperimentConfig.from_dict(doc, subcommand=args.subcommand)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    out_dir = args.out or cfg.out_dir or f"eqlab_out/{cfg.subcommand}"
    paths = write_report(report, out_dir, plots=not args.no_plots)
    for name, ok in sorted(report.checks.items()):
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    print(f"report: {paths[0]}")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
