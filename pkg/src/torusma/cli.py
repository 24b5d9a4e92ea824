"""Command-line front end: ``torusma solve|verify|report``.

Exit codes: 0 success, 2 continuity-step underflow, 64 usage or malformed
configuration, 66 missing or corrupt trace file, 74 file I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .expressions import ExpressionError, parse_expression
from .fileio import (
    TRACE_FIELDS,
    SnapshotFormatError,
    read_field,
    read_trace,
    sha256_file,
    write_field,
    write_metric,
    write_trace,
)
from .geometry import flat_metric, metric_from_potential
from .grid import Grid, make_field, mean_zero_project
from .solver import SolverConfig, continuity_solve
from .verification import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_UNDERFLOW = 2
EXIT_USAGE = 64
EXIT_NO_TRACE = 66
EXIT_IO = 74


class ConfigError(ValueError):
    pass


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("n", "N"):
        if key not in cfg or not isinstance(cfg[key], int):
            raise ConfigError(f"config requires an integer {key!r}")
    return cfg


_TOLERANCE_KEYS = (
    "newton_tol", "newton_max_iter", "t_step_initial", "t_step_min",
    "damping_eig_floor", "krylov_tol", "krylov_max_iter",
)


def _solver_config(cfg: dict) -> SolverConfig:
    overrides = {k: cfg[k] for k in _TOLERANCE_KEYS if k in cfg}
    try:
        return SolverConfig(n=cfg["n"], N=cfg["N"], **overrides)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"bad solver settings: {e}") from e


def _scalar_from_spec(spec, grid: Grid, what: str, inputs: dict):
    """Build a scalar field from an expression string or a {"path": ...} ref."""
    if isinstance(spec, str):
        try:
            expr = parse_expression(spec)
        except ExpressionError as e:
            raise ConfigError(f"bad {what} expression: {e}") from e
        if not expr.band_limited(grid):
            raise ConfigError(
                f"{what} expression has harmonics above N/4 for N={grid.N}"
            )
        return expr.evaluate(grid)
    if isinstance(spec, dict) and isinstance(spec.get("path"), str):
        path = spec["path"]
        field = read_field(path)  # may raise OSError / SnapshotFormatError
        if field.grid != grid:
            raise ConfigError(
                f"{what} snapshot grid (n={field.grid.n}, N={field.grid.N}) "
                f"does not match the config grid"
            )
        inputs[what] = {"path": path, "sha256": sha256_file(path)}
        return field
    raise ConfigError(f"{what} must be an expression string or {{\"path\": ...}}")


def _background(cfg: dict, grid: Grid, inputs: dict):
    spec = cfg.get("background", "flat")
    if spec == "flat":
        return flat_metric(grid)
    if isinstance(spec, dict) and "potential" in spec:
        psi = _scalar_from_spec(spec["potential"], grid, "background potential", inputs)
        psi = mean_zero_project(make_field(grid, psi.values.real))
        return metric_from_potential(flat_metric(grid), psi)
    raise ConfigError('background must be "flat" or {"potential": ...}')


def cmd_solve(args) -> int:
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    cfg = _load_config(args.config)
    grid = Grid(n=cfg["n"], N=cfg["N"])
    inputs: dict = {}
    g = _background(cfg, grid, inputs)
    F = _scalar_from_spec(cfg.get("F", "0"), grid, "F", inputs)
    F = make_field(grid, F.values.real)
    solver_cfg = _solver_config(cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result = continuity_solve(F, g, solver_cfg)
    elapsed = time.perf_counter() - start

    phi_path = out / "phi.cmaf"
    metric_path = out / "metric.cmmf"
    trace_path = out / "trace.json"
    write_field(phi_path, result.phi)
    write_metric(metric_path, metric_from_potential(g, result.phi))
    write_trace(trace_path, result.trace)
    manifest = {
        "version": __version__,
        "config": cfg,
        "inputs": inputs,
        "outputs": {
            "phi": str(phi_path),
            "metric": str(metric_path),
            "trace": str(trace_path),
        },
        "converged": result.converged,
        "t_reached": result.t_reached,
        "elapsed_s": elapsed,
        "threads": args.threads,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    if not result.converged:
        print(f"solve failed: {result.message}", file=sys.stderr)
        return EXIT_UNDERFLOW
    final = result.trace.steps[-1]
    print(
        f"solved n={grid.n} N={grid.N} in {elapsed:.2f}s; "
        f"final residual {final.residual_sup:.3e}"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITE_NAMES:
        print(
            f"error: unknown suite {args.suite!r}; choose from "
            f"{', '.join(SUITE_NAMES)} or 'all'",
            file=sys.stderr,
        )
        return EXIT_USAGE
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    reports = []
    for name in names:
        report = run_suite(name)
        reports.append(report)
        for c in report.checks:
            status = "pass" if c.passed else "FAIL"
            print(f"{c.name:<32} {c.value:12.3e}  <= {c.threshold:8.1e}  {status}")
        print(f"suite {report.suite}: {'pass' if report.passed else 'FAIL'} "
              f"({report.elapsed_s:.2f}s)")
    if args.out:
        payload = [r.to_json() for r in reports] if args.suite == "all" \
            else reports[0].to_json()
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
    return EXIT_OK if all(r.passed for r in reports) else 1


def cmd_report(args) -> int:
    try:
        trace = read_trace(args.trace)
    except FileNotFoundError:
        print(f"error: trace file not found: {args.trace}", file=sys.stderr)
        return EXIT_NO_TRACE
    except (SnapshotFormatError, json.JSONDecodeError, ValueError) as e:
        print(f"error: corrupt trace file: {e}", file=sys.stderr)
        return EXIT_NO_TRACE
    records = trace.to_json_records()
    widths = {f: max(len(f), 12) for f in TRACE_FIELDS}
    print("  ".join(f"{f:>{widths[f]}}" for f in TRACE_FIELDS))
    for rec in records:
        cells = []
        for f in TRACE_FIELDS:
            v = rec[f]
            cells.append(f"{v:>{widths[f]}d}" if isinstance(v, int)
                         else f"{v:>{widths[f]}.5e}")
        print("  ".join(cells))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(TRACE_FIELDS))
            writer.writeheader()
            writer.writerows(records)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusma",
        description="Torus complex Monge-Ampere solver and verification suites",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the continuity-method solver")
    p_solve.add_argument("--config", required=True, help="JSON problem description")
    p_solve.add_argument("--out", required=True, help="output directory")
    p_solve.add_argument("--threads", type=int, default=1,
                         help="worker threads for the solve")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("--suite", required=True,
                          help=f"one of: {', '.join(SUITE_NAMES)}")
    p_verify.add_argument("--out", help="write the suite report as JSON")
    p_verify.add_argument("--threads", type=int, default=1)
    p_verify.set_defaults(func=cmd_verify)

    p_report = sub.add_parser("report", help="render a solve trace as a table")
    p_report.add_argument("trace", help="path to a trace JSON file")
    p_report.add_argument("--csv", help="also write the table as CSV")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; remap to the documented code
        if e.code not in (0, None):
            return EXIT_USAGE
        raise
    if args.command == "verify" and args.threads > 1:
        print("error: --threads > 1 is only supported for solve", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SnapshotFormatError as e:
        print(f"error: corrupt snapshot: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"error: I/O failure: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
