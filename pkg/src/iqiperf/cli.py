"""Command-line entry point (``iqiperf``).

Exit status: 0 on success, 1 when validation finds a failing point,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import fixture_path, load_config, parse_range
from .errors import ConfigError, IqiError
from .sweep import format_csv, format_report, run_sweep, validate, write_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_COMMANDS = {
    "analytic": "analytic SER only",
    "simulate": "analytic SER and Monte Carlo estimates",
    "bound": "analytic SER, upper bounds and error floors",
    "sweep": "whatever the configuration enables",
    "validate": "simulate and bound every point, then check coverage, dominance and MGFs",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iqiperf", description="SER analysis of links with I/Q imbalance.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="configuration file")
        src.add_argument("--fixture", help="name of a shipped configuration, e.g. paper_fig1.cfg")
        p.add_argument("--snr", help="override snr_db (start:stop:step or comma list)")
        p.add_argument("--seed", type=int, help="override the simulation seed")
        p.add_argument("--out", type=Path, help="CSV output path (default: <output>.csv, else stdout)")
        if name == "validate":
            p.add_argument("--report", type=Path, help="write the report here instead of stdout")
    return parser


def _output_path(args, spec):
    if args.out is not None:
        return args.out
    if spec.output:
        return Path(spec.output + ".csv")
    return None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_config(args.config if args.config is not None else fixture_path(args.fixture))
        spec = spec.with_overrides(
            snr_db=parse_range(args.snr) if args.snr else None,
            seed=args.seed,
        )
    except ConfigError as exc:
        print(f"iqiperf: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IqiError as exc:
        print(f"iqiperf: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE

    flags = {
        "analytic": dict(simulate=False, bound=False),
        "simulate": dict(simulate=True, bound=False),
        "bound": dict(simulate=False, bound=True),
        "sweep": {},
    }
    status = EXIT_OK
    if args.command == "validate":
        rows, lines = validate(spec)
        report = format_report(lines)
        if args.report is not None:
            args.report.parent.mkdir(parents=True, exist_ok=True)
            args.report.write_text(report)
        else:
            sys.stdout.write(report)
        status = EXIT_OK if all(line.ok for line in lines) else EXIT_FAIL
    else:
        rows = run_sweep(spec, **flags[args.command])

    path = _output_path(args, spec)
    if path is None:
        if args.command != "validate":
            sys.stdout.write(format_csv(rows, spec))
    else:
        write_csv(path, rows, spec)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
