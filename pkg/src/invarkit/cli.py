"""Command-line verification harness.

    invarkit run --suite <name> --seed <u64> --samples <int> \
        --out <path> --format json|csv [--config <file>] [--workers <int>]

Config-file values are overridden by explicit flags; unknown config keys
are rejected. Exit status is 0 iff every non-skipped check passed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import InvalidConfig, MalformedFile
from .suites import SUITES, SuiteConfig, run_suite, write_report

_CONFIG_KEYS = {"suite", "seed", "samples", "output_path", "format", "workers"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invarkit", description="Run verification suites."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("--suite", choices=SUITES, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--samples", type=int, default=None)
    run.add_argument("--out", dest="output_path", default=None)
    run.add_argument("--format", choices=("json", "csv"), default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--config", dest="config_file", default=None)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as exc:
        raise MalformedFile(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedFile("config file must hold a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise MalformedFile(f"unknown config keys: {sorted(unknown)}")
    return doc


def parse_config(argv) -> SuiteConfig:
    """Merge config file and flags (flags win) into a validated SuiteConfig."""
    args = _build_parser().parse_args(argv)
    merged = {
        "suite": "all",
        "seed": 0,
        "samples": 100_000,
        "output_path": None,
        "format": "json",
        "workers": 1,
    }
    if args.config_file:
        merged.update(_load_config_file(args.config_file))
    for key in ("suite", "seed", "samples", "output_path", "workers"):
        value = getattr(args, key)
        if value is not None:
            merged[key] = value
    if args.format is not None:
        merged["format"] = args.format
    return SuiteConfig(
        suite=merged["suite"],
        seed=int(merged["seed"]),
        samples=int(merged["samples"]),
        output_path=merged["output_path"],
        fmt=merged["format"],
        workers=int(merged["workers"]),
    )


def main(argv=None) -> int:
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
    except (InvalidConfig, MalformedFile) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    report = run_suite(config)
    write_report(report, config)

    for c in report.checks:
        print(
            f"[{c.status.upper():4s}] {c.check_id}: value={c.value:.6g} "
            f"tol={c.tolerance:.6g} ({c.provenance})"
        )
    n_fail = sum(1 for c in report.checks if c.status == "fail")
    n_skip = sum(1 for c in report.checks if c.status == "skip")
    print(
        f"suite={report.suite} seed={report.seed} checks={len(report.checks)} "
        f"failed={n_fail} skipped={n_skip} wall_time={report.wall_time:.2f}s"
    )
    return 0 if n_fail == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
