"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 rank/excitation failure,
4 containment violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .config import BUILTIN_CONFIGS, ConfigError, LipschitzSpec, load_config
from .data import InsufficientExcitationError
from .experiment import run_experiment, verify_containment
from .export import FORMATS, export, load_report
from .linear_reach import inclusion_check

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RANK = 3
EXIT_VIOLATION = 4

log = logging.getLogger("zonoreach")


def _setup_logging() -> None:
    level = os.environ.get("ZONOREACH_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _formats(text: str) -> list[str]:
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {FORMATS}")
    return out


def _dims(text: str) -> tuple[int, int]:
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'i,j', got {text!r}") from None
    return i, j


def _apply_overrides(config, args):
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "trials", None) is not None:
        config = replace(config, verification=replace(config.verification, trials=args.trials))
    if getattr(args, "workers", None) is not None:
        config = replace(config, verification=replace(config.verification, workers=args.workers))
    if getattr(args, "neglect_epsilon", False):
        config = replace(config, lipschitz=LipschitzSpec("neglect"))
    return config


def _summarize(report) -> str:
    tally = report.containment
    lines = [
        f"experiment {report.config.name} ({report.config.mode}), horizon {report.config.horizon}",
        f"  data points T = {report.data.T}, rank {report.rank['rank']}/{report.rank['required']}",
        f"  generator counts: {report.data_driven.meta['generator_counts']}",
        f"  containment: {tally.passes}/{tally.trials} trials inside every set",
    ]
    if report.inclusion is not None:
        worst = min(report.inclusion.worst_margins)
        lines.append(f"  inclusion vs model-based: {'pass' if report.inclusion.passed else 'FAIL'} (worst margin {worst:.3e})")
    if not report.data_driven.meta.get("guaranteed", True):
        lines.append("  note: covering term neglected; sets are not formally guaranteed")
    if report.timings:
        lines.append("  timings [s]: " + ", ".join(f"{k}={v:.2f}" for k, v in report.timings.items()))
    return "\n".join(lines)


def _run(config, args) -> int:
    config = _apply_overrides(config, args)
    try:
        report = run_experiment(config)
    except InsufficientExcitationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK
    paths = export(report, args.formats, args.out)
    print(_summarize(report))
    for p in paths:
        print(f"  wrote {p}")
    return EXIT_VIOLATION if report.containment.violations else EXIT_OK


def cmd_run(args) -> int:
    return _run(load_config(args.config), args)


def cmd_demo(name: str):
    def run(args) -> int:
        return _run(BUILTIN_CONFIGS[name](), args)

    return run


def cmd_verify(args) -> int:
    report = load_report(args.report)
    config = _apply_overrides(report.config, args)
    tally = verify_containment(report.data_driven, config, trials=args.trials)
    print(f"containment: {tally.passes}/{tally.trials} trials inside every set")
    for f in tally.failures:
        print(f"  violation: trial {f['trial']} step {f['k']} state {f['state']}")
    status = EXIT_VIOLATION if tally.violations else EXIT_OK
    if report.model_based is not None:
        inc = inclusion_check(report.model_based, report.data_driven, config.verification.directions, config.seed)
        print(f"inclusion vs model-based: {'pass' if inc.passed else 'FAIL'} (worst margin {min(inc.worst_margins):.3e})")
        if not inc.passed:
            status = EXIT_VIOLATION
    return status


def cmd_plot(args) -> int:
    report = load_report(args.report)
    try:
        paths = export(report, ["svg"], args.out, dims=[args.dims] if args.dims else None)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zonoreach", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p, config: bool):
        if config:
            p.add_argument("--config", required=True, help="experiment config (JSON)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--trials", type=int, help="Monte Carlo trials")
        p.add_argument("--workers", type=int, help="worker processes for verification")
        p.add_argument("--neglect-epsilon", action="store_true", help="drop the Lipschitz covering term")
        p.add_argument("--formats", type=_formats, default=list(FORMATS), help="comma list of json,csv,svg")

    p = sub.add_parser("run", help="run an experiment from a config file")
    add_run_flags(p, True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="re-check a report by fresh Monte Carlo simulation")
    p.add_argument("--report", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render SVG projections of a report")
    p.add_argument("--report", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--dims", type=_dims, help="projection pair 'i,j' (0-based)")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("demo-linear5d", help="five-dimensional linear example")
    add_run_flags(p, False)
    p.set_defaults(func=cmd_demo("linear5d"))

    p = sub.add_parser("demo-nonlinear", help="two-state reactor example")
    add_run_flags(p, False)
    p.set_defaults(func=cmd_demo("cstr"))
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
