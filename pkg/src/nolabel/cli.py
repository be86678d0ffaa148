"""Command-line interface.

Subcommands:

* ``run <config.json>``    execute one scenario
* ``sweep <config.json>``  execute the scenario's parameter sweep
* ``validate``             run the cross-module invariant suite
* ``bench``                time the permanent kernel over matrix sizes

``--out`` writes the CSV/JSON report (stdout otherwise); report paths for
run/sweep/bench also get a PNG figure next to the delimited output unless
``--no-plot`` is given.  Exit status is 0 on success and nonzero when a
scenario fails to validate or any suite check fails.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NoLabelError
from .kernels import permanent
from .scenario import (
    RUN_RECORD_COLUMNS,
    emit_report,
    load_scenario,
    render_report,
    render_rows,
    run_pipeline,
    run_sweep,
)
from .validation import validate_suite


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="report file path (stdout if omitted)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")
    parser.add_argument("--seed", type=int, default=2024, help="seed for randomized checks and benches")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweep rows")
    parser.add_argument("--no-plot", action="store_true", help="skip the PNG figure next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nolabel",
        description="Simulate deformations, indistinguishability, and postselected entanglement "
        "for systems of identical particles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario")
    p_run.add_argument("config", type=Path, help="scenario JSON file")
    _add_common_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="execute a scenario's parameter sweep")
    p_sweep.add_argument("config", type=Path, help="scenario JSON file with a sweep section")
    _add_common_flags(p_sweep)

    p_validate = sub.add_parser("validate", help="run the invariant suite")
    _add_common_flags(p_validate)

    p_bench = sub.add_parser("bench", help="permanent kernel timings")
    p_bench.add_argument(
        "--sizes", type=int, nargs="+", default=list(range(4, 21)), help="matrix sizes to time"
    )
    _add_common_flags(p_bench)

    return parser


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def _emit(records, args, figure=True) -> None:
    if args.out is None:
        sys.stdout.write(render_report(records, args.format))
        return
    emit_report(records, args.format, args.out)
    print(f"wrote {args.out}")
    if figure and not args.no_plot:
        from .figures import render_report_figure

        figure_file = render_report_figure(records, _figure_path(args.out))
        print(f"wrote {figure_file}")


def _cmd_run(args) -> int:
    config = load_scenario(args.config)
    if config.sweep is not None:
        print("note: config defines a sweep; running once at the base parameters", file=sys.stderr)
    record = run_pipeline(config)
    _emit([record], args)
    return 0


def _cmd_sweep(args) -> int:
    config = load_scenario(args.config)
    records = run_sweep(config, threads=max(1, args.threads))
    _emit(records, args)
    return 0


def _cmd_validate(args) -> int:
    report = validate_suite(seed=args.seed)
    print(report.format())
    if args.out is not None:
        text = render_rows(report.to_rows(), ("name", "passed", "detail"), args.format)
        args.out.write_text(text)
        print(f"wrote {args.out}")
    return 0 if report.passed else 1


def _cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for n in args.sizes:
        matrix = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        started = time.perf_counter()
        value = permanent(matrix)
        elapsed = time.perf_counter() - started
        rows.append({"n": n, "seconds": elapsed, "magnitude": abs(value)})
        print(f"n={n:2d}  {elapsed:9.4f} s  |permanent| = {abs(value):.6g}")
    if args.out is not None:
        args.out.write_text(render_rows(rows, ("n", "seconds", "magnitude"), args.format))
        print(f"wrote {args.out}")
        if not args.no_plot:
            from .figures import render_bench_figure

            figure_file = render_bench_figure(rows, _figure_path(args.out))
            print(f"wrote {figure_file}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep, "validate": _cmd_validate, "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except NoLabelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
