"""Command-line entry point.

Subcommands: ``describe`` (full report), ``discover`` (DOT or model JSON),
``stats`` (indicator JSON) and ``dump-defaults`` (editable config text).

Exit codes: 0 success, 2 config, 3 ingest, 4 pipeline, 5 output I/O.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import dump_indicators_json
from .configfile import ConfigBundle, dump_defaults, load_config_file
from .discovery import dump_model_json, to_dot
from .errors import ProcTextError
from .pipeline import RunConfig, analyze, build_run_config, describe, discover, load_log
from .realization import report_to_json, report_to_text

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INGEST = 3
EXIT_PIPELINE = 4
EXIT_OUTPUT = 5

_EXIT_BY_CATEGORY = {"config": EXIT_CONFIG, "ingest": EXIT_INGEST, "pipeline": EXIT_PIPELINE}


class _OutputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is already the config code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: config error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser):
    # every default is None so values from --config are not clobbered
    p.add_argument("--config", help="run/vocabulary/template config file")
    g = p.add_argument_group("input")
    g.add_argument("--log", help="event log (.csv, .xes or .json)")
    g.add_argument("--format", help="csv | xes | json (default: from extension)")
    g.add_argument("--case-col")
    g.add_argument("--activity-col")
    g.add_argument("--timestamp-col")
    g.add_argument("--timestamp-format", help="'iso' or a strptime pattern")
    g.add_argument("--lifecycle-col")
    g.add_argument("--resource-col")
    g.add_argument("--delimiter")
    g.add_argument("--timezone", help="zone for naive timestamps (default UTC)")
    g.add_argument("--policy", help="fail | skip malformed rows")
    g = p.add_argument_group("discovery and analysis")
    g.add_argument("--abstraction", help="complete_only | collapse_pairs")
    g.add_argument("--min-dependency")
    g.add_argument("--min-arc-count")
    g.add_argument("--min-activity-count")
    g.add_argument("--compare", action="append",
                   help="metric:subject:startA..endA:startB..endB (repeatable)")
    g.add_argument("--path", action="append", help="comma separated activities (repeatable)")
    g.add_argument("--path-match", help="contains | exact")
    g.add_argument("--strict", action="store_const", const="true",
                   help="fail when a trace cannot be replayed on the model")
    g = p.add_argument_group("summaries and output")
    g.add_argument("--min-truth")
    g.add_argument("--cap", help="sentences per category")
    g.add_argument("--top-variants")
    g.add_argument("--out", help="text | json")
    g.add_argument("--dot", help="also write the process graph here")
    g.add_argument("--lang")
    g.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="proctext", description="Linguistic descriptions of event logs.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, help_ in (
        ("describe", "run the whole pipeline and print the report"),
        ("discover", "print the discovered process graph"),
        ("stats", "print the replay indicators as JSON"),
    ):
        _add_run_flags(sub.add_parser(name, help=help_))
    d = sub.add_parser("dump-defaults", help="print the default vocabulary and templates")
    d.add_argument("--output", "-o")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    bundle = load_config_file(args.config) if args.config else ConfigBundle()
    options = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    return build_run_config(options, bundle)


def _write(path: Path | None, text: str, stdout):
    if path is None:
        stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _OutputError(f"cannot write {path}: {exc.strerror}") from exc


def _run(args, stdout) -> None:
    if args.command == "dump-defaults":
        _write(Path(args.output) if args.output else None, dump_defaults(), stdout)
        return
    cfg = config_from_args(args)
    log, _diag = load_log(cfg)

    if args.command == "discover":
        model = discover(cfg, log)
        body = dump_model_json(model) if cfg.out == "json" else to_dot(model)
        if cfg.dot is not None:
            _write(cfg.dot, to_dot(model), stdout)
        _write(cfg.output, body, stdout)
        return
    if args.command == "stats":
        model = discover(cfg, log)
        ind = analyze(cfg, log, model)
        if cfg.dot is not None:
            _write(cfg.dot, to_dot(model), stdout)
        _write(cfg.output, dump_indicators_json(ind), stdout)
        return

    # render everything before writing anything: no partial output on failure
    report, model, _ind = describe(cfg, log)
    body = report_to_json(report) if cfg.out == "json" else report_to_text(report)
    if cfg.dot is not None:
        _write(cfg.dot, to_dot(model), stdout)
    _write(cfg.output, body, stdout)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        _run(args, stdout)
    except _OutputError as exc:
        stderr.write(f"proctext: output error: {exc}\n")
        return EXIT_OUTPUT
    except ProcTextError as exc:
        stderr.write(f"proctext: {exc.category} error: {exc}\n")
        return _EXIT_BY_CATEGORY.get(exc.category, EXIT_PIPELINE)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
