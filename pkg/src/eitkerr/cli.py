"""
Command-line interface.

Verbs: ``reproduce-paper``, ``sweep``, ``validate``, ``respond``. Exit codes
are 0 on success, 2 when an acceptance or validation check fails and 1 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from typing import Optional, Sequence

from . import io, pipelines
from .errors import AcceptanceFailure, EITError, ValidationError, ValidationFailure
from .presets import slow_light_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_globals(p):
    p.add_argument("--config", help="YAML configuration file")
    p.add_argument("--out", help="output file (relative paths go under $EITKERR_OUTPUT_DIR)")
    p.add_argument("--strict", action="store_true",
                   help="turn approximation warnings into errors")
    p.add_argument("--threads", type=int, default=1, help="worker threads for ensemble runs")
    p.add_argument("--format", choices=io.FORMATS, default="table", dest="fmt")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eitkerr", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reproduce-paper", help="recompute the slow-light numbers")
    _add_globals(p)
    p.add_argument("--tolerance", type=float, default=pipelines.DEFAULT_TOLERANCE,
                   help="relative tolerance against quoted values")

    p = sub.add_parser("sweep", help="scan one parameter")
    _add_globals(p)
    p.add_argument("--variable", required=True, choices=pipelines.SWEEP_VARIABLES)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    p.add_argument("--outputs", default=",".join(pipelines.DEFAULT_SWEEP_OUTPUTS),
                   help="comma-separated response quantities")

    p = sub.add_parser("validate", help="check perturbative results against the Fock oracle")
    _add_globals(p)
    p.add_argument("--duration-factor", type=float, default=400.0,
                   help="ramp duration in units of 1/Omega")
    p.add_argument("--ensemble", action="store_true",
                   help="evolve the whole truncated ensemble instead of sample manifolds")

    p = sub.add_parser("respond", help="response quantities for one configuration")
    _add_globals(p)
    return parser


def _load(args):
    if args.config:
        cfg = io.load_config(args.config)
        if args.strict:
            cfg = cfg.with_updates(strict=True)
        return cfg
    return None


def _emit(args, text):
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    cfg = _load(args)
    if args.threads < 1:
        raise ValidationError("--threads must be >= 1")

    if args.command == "reproduce-paper":
        cfg = cfg or slow_light_config(strict=args.strict)
        cfg, rows = pipelines.reproduce_paper(args.tolerance, cfg)
        manifest = io.RunManifest.for_config(cfg, args.command, {"tolerance": args.tolerance})
        _emit(args, io.format_columns(manifest, pipelines.rows_to_columns(rows), args.fmt))
        try:
            pipelines.check_rows(rows)
        except AcceptanceFailure as exc:
            print(f"eitkerr: {exc}", file=sys.stderr)
            return EXIT_CHECK
        return EXIT_OK

    if args.command == "sweep":
        cfg = cfg or slow_light_config(strict=args.strict)
        outputs = tuple(s.strip() for s in args.outputs.split(",") if s.strip())
        spec = pipelines.SweepSpec(args.variable, args.start, args.stop, args.points,
                                   args.scale, outputs)
        columns = pipelines.run_sweep(cfg, spec)
        manifest = io.RunManifest.for_config(cfg, args.command, {
            "variable": spec.variable, "start": spec.start, "stop": spec.stop,
            "points": spec.points, "scale": spec.scale, "outputs": list(outputs)})
        _emit(args, io.format_columns(manifest, columns, args.fmt))
        return EXIT_OK

    if args.command == "validate":
        cfg = cfg or pipelines.default_validation_config().with_updates(strict=args.strict)
        report = pipelines.run_validation(cfg, duration_factor=args.duration_factor,
                                          full_ensemble=args.ensemble, threads=args.threads)
        manifest = io.RunManifest.for_config(cfg, args.command, {
            "duration_factor": args.duration_factor, "ensemble": args.ensemble})
        _emit(args, io.format_report(manifest, report.as_dict(), args.fmt))
        if not report.passed:
            print(f"eitkerr: {ValidationFailure(report.failed)}", file=sys.stderr)
            return EXIT_CHECK
        return EXIT_OK

    cfg = cfg or slow_light_config(strict=args.strict)
    manifest = io.RunManifest.for_config(cfg, args.command)
    _emit(args, io.format_report(manifest, pipelines.respond(cfg), args.fmt))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return _run(args)
    except (EITError, ValueError, OSError) as exc:
        print(f"eitkerr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
