"""Command-line entry point: ``skelfix repair --bug <dir> --config <file> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import Config, ConfigError, load_config
from .pipeline import EXIT_CONFIG, run_repair

log = logging.getLogger("skelfix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelfix", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)
    rep = sub.add_parser("repair", help="repair one bug directory")
    rep.add_argument("--bug", required=True, type=Path, help="bug directory")
    rep.add_argument("--config", type=Path, help="JSON configuration file")
    rep.add_argument("--fl", type=Path, help="ranked suspicious functions (fl.json)")
    rep.add_argument("--keep-going", action="store_true", default=None,
                     help="continue after the first plausible patch")
    rep.add_argument("--validation-workers", type=int, help="parallel validations")
    rep.add_argument("--dump-symbols", action="store_true", help="print the symbol table of each function")
    rep.add_argument("--extra-sources", help="directory of additional *.src files for class lookup")
    rep.add_argument("--max-candidates-per-skeleton", type=int)
    rep.add_argument("--max-mods-per-patch", type=int)
    rep.add_argument("--wall-clock-limit", type=float, help="seconds for the whole run")
    rep.add_argument("--per-test-timeout", type=float, help="seconds per test command")
    rep.add_argument("--report", type=Path, help="report path (default <bug>/report.json)")
    rep.add_argument("--quiet", action="store_true", help="do not echo the report on stdout")
    return parser


def _overrides(args: argparse.Namespace, cfg: Config) -> dict:
    out = {
        "keep_going": args.keep_going,
        "validation_workers": args.validation_workers,
        "extra_sources": args.extra_sources,
        "max_candidates_per_skeleton": args.max_candidates_per_skeleton,
        "max_mods_per_patch": args.max_mods_per_patch,
    }
    budget = {k: v for k, v in (("wall_clock_limit", args.wall_clock_limit),
                                ("per_test_timeout", args.per_test_timeout)) if v is not None}
    if budget:
        out["budget"] = budget
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        cfg = cfg.merged(_overrides(args, cfg))
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    code, report = run_repair(args.bug, cfg, fl_path=args.fl, dump_symbols=args.dump_symbols,
                              report_path=args.report)
    if not args.quiet:
        json.dump(report.to_json(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
