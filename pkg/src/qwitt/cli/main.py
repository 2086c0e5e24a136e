"""Command-line entry point.

    qwitt <command> [--config PATH] [--out DIR] [--seed INT] [key=value ...]

The JSON report goes to stdout and, with ``--out``, to ``DIR/report.json``.
Exit status: 0 all checks passed, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .commands import COMMANDS, EXIT_CONFIG
from .config import ConfigError, RunConfig


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qwitt", description="Deformed Witt algebra checks and lattice evolution.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, help="JSON run configuration")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--seed", type=int, help="seed for randomized sweeps")
    ap.add_argument("--quiet", action="store_true", help="do not print the report")
    ap.add_argument("overrides", nargs="*", metavar="key=value", help="dotted-key overrides, values parsed as JSON")
    return ap


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def run(command: str, config: RunConfig) -> tuple[int, dict]:
    status, report = COMMANDS[command](config)
    out = config.output
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(dumps(report))
    return status, report


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    try:
        kw = {"overrides": args.overrides, "seed": args.seed, "output": args.out}
        if args.config:
            cfg = RunConfig.load(args.config, args.command, **kw)
        else:
            cfg = RunConfig.build(args.command, {}, **kw)
        status, report = run(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        sys.stdout.write(dumps(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
