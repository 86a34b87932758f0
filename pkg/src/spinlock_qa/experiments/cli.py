"""``anneal run``: execute an experiment from a JSON config and export the table."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from spinlock_qa.experiments.config import EXPERIMENTS, load_config
from spinlock_qa.experiments.runs import run_experiment
from spinlock_qa.experiments.table import export, format_cell


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anneal", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--config", help="JSON config file (defaults are used when omitted)")
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--out", help="output path; printed to stdout as CSV when omitted")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config field, e.g. --set spec.L=3 --set frame=rotating",
    )
    run.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config, args.overrides, experiment=args.experiment, output=args.out, format=args.format)
    except Exception as exc:  # schema, JSON and parameter errors all end the run here
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2

    table = run_experiment(cfg)
    if cfg.output:
        export(table, cfg.output, cfg.format)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_cell(row[c]) for c in table.columns])

    problems = table.violations()
    for name, ok in table.metadata.get("checks", {}).items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}", file=sys.stderr)
    for p in problems:
        if not p.startswith("check failed"):
            print(f"[FAIL] {p}", file=sys.stderr)
    return 0 if not problems else 1


if __name__ == "__main__":
    sys.exit(main())
