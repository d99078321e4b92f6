"""Command-line entry point: ``nc-spectra run`` and ``nc-spectra check``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .model import ATermMode, ClosedFormMode, NCSpectraError
from .output import closed_form_audit, emit_csv, emit_report, emit_svg

OUT_DIR_ENV = "NC_SPECTRA_OUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_UNCONVERGED = 0, 2, 3

MODES = {
    "paper": (ATermMode.PAPER_LITERAL, ClosedFormMode.PAPER_LITERAL),
    "exact": (ATermMode.EXPANDED_EXACT, ClosedFormMode.COMPLETED_SQUARE),
    "quadrature": (ATermMode.EXPANDED_EXACT, ClosedFormMode.QUADRATURE_ONLY),
}

log = logging.getLogger("ncspectra")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nc-spectra", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep described by a config file")
    run.add_argument("config", type=Path)
    run.add_argument("--out-dir", type=Path, default=None,
                     help=f"output directory (default: ${OUT_DIR_ENV} or the current directory)")
    run.add_argument("--validate", action="store_true", help="also solve the finite-difference oracle")
    run.add_argument("--mode", choices=sorted(MODES), default=None,
                     help="override the a-term and closed-form modes of the config")
    run.add_argument("--jobs", type=int, default=1, help="worker threads for the sweep")

    sub.add_parser("check", help="run the built-in fixture and property suite")
    return parser


def _run(args) -> int:
    from .sweep import run_sweep

    try:
        config = parse_config(args.config)
    except (ConfigError, NCSpectraError, ValueError) as exc:
        print(f"nc-spectra: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.mode:
        config = config.with_modes(*MODES[args.mode])
    if args.validate and not config.validate:
        from dataclasses import replace
        config = replace(config, validate=True)
    if args.jobs < 1:
        print("nc-spectra: config error: --jobs must be ≥ 1", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = args.out_dir or Path(os.environ.get(OUT_DIR_ENV, "."))
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"nc-spectra: cannot create {out_dir}: {exc.strerror}", file=sys.stderr)
        return 1

    log.info("sweeping %s", args.config)
    try:
        rows = run_sweep(config, jobs=args.jobs)
    except NCSpectraError as exc:
        print(f"nc-spectra: {exc}", file=sys.stderr)
        return 1

    written = []
    try:
        if "csv" in config.outputs:
            written.append(emit_csv(rows, out_dir / "spectrum.csv"))
        if "svg" in config.outputs:
            written.append(emit_svg(rows, out_dir / "levels.svg"))
        if "report" in config.outputs:
            from .figures import plot_closed_form_audit, plot_levels

            figures = [plot_levels(rows, out_dir / "levels.png"),
                       plot_closed_form_audit(closed_form_audit(config), out_dir / "closed_form_audit.png")]
            written += figures
            written.append(emit_report(rows, out_dir / "report.md", config, figures))
    except OSError as exc:
        print(f"nc-spectra: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)

    failed = [r for r in rows if r.error]
    if failed:
        print(f"nc-spectra: {len(failed)} row(s) carry an error flag; see the report", file=sys.stderr)
    if config.validate and any(not r.oracle_converged for r in rows):
        print("nc-spectra: finite-difference oracle did not converge for some states", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _check() -> int:
    from .checks import run_all

    results = run_all(echo=print)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    return _check()


if __name__ == "__main__":
    sys.exit(main())
