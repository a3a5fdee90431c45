"""Experiment orchestration: the ``squarefull`` command line.

Subcommands: count, enumerate, variance, diagonal, constants, verify, grid.
All numeric output uses 12 significant digits, so repeated runs with the same
configuration produce byte-identical files.  Exit codes: 0 success, 1 check
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import datetime
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__, analytic_checks, asymptotics, report
from .counting import bg_approx, count_upto, interval_upper_bound
from .exactmath import (
    enumerate_squarefull_arrays,
    read_enumeration_cache,
    write_enumeration_cache,
)
from .sweep import ExperimentConfig, VarianceReport, variance_report

THREADS_ENV = "SQUAREFULL_THREADS"

VARIANCE_CSV_COLUMNS = ("X", "H", "total", "J1", "J2", "I2", "predicted", "ratio", "events")
DIAGONAL_CSV_COLUMNS = ("H", "value", "predicted", "ratio", "abs_dev", "envelope", "degenerate")


class CacheIOError(RuntimeError):
    pass


def fmt12(value) -> str:
    """12-significant-digit decimal; ints print exactly."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


@dataclasses.dataclass
class RunManifest:
    """Echo of one grid run's configuration and outputs.

    Re-running with the same configuration reproduces the numeric outputs
    byte for byte; the manifest itself carries timestamps as metadata only.
    """

    mode: str
    X: int | None
    H_grid: list[str]
    eps: float
    lam: float | None
    tolerance: float
    threads: int
    seed: int | None  # reserved; every current pipeline stage is deterministic
    cache_path: str | None
    toolkit_version: str
    created_utc: str
    outputs: list[str]
    results_index: list[dict]

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _parse_h(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _parse_h_grid(text: str) -> list[Fraction]:
    return [_parse_h(part) for part in text.split(",") if part.strip()]


def _variance_csv_row(rep: VarianceReport) -> str:
    return ",".join(
        [
            fmt12(rep.X),
            fmt12(rep.H),
            fmt12(rep.total),
            fmt12(rep.J1),
            fmt12(rep.J2),
            fmt12(rep.I2),
            fmt12(rep.predicted),
            fmt12(rep.ratio),
            fmt12(rep.event_count),
        ]
    )


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# grid runs
# ---------------------------------------------------------------------------


def _load_or_build_enumeration(x: int, top: int, cache_path: str | None):
    """(n, b) arrays covering (x, top], via the cache file when possible."""
    if cache_path and os.path.exists(cache_path):
        try:
            lo, hi, (_, b, n) = read_enumeration_cache(cache_path)
        except (OSError, ValueError) as exc:
            raise CacheIOError(f"cannot read cache {cache_path}: {exc}") from exc
        if lo <= x + 1 and hi >= top:
            keep = (n > x) & (n <= top)
            return n[keep], b[keep]
    a, b, n = enumerate_squarefull_arrays(x + 1, top)
    if cache_path:
        try:
            write_enumeration_cache(cache_path, x + 1, top, (a, b, n))
        except OSError as exc:
            raise CacheIOError(f"cannot write cache {cache_path}: {exc}") from exc
    return n, b


def _admissible(x: int, h: Fraction) -> bool:
    hf = float(h)
    return x**0.01 < hf < x**0.25


def _grid_variance_job(args: tuple) -> dict:
    x, h_str, eps, lam, cache_path = args
    cfg = ExperimentConfig(X=x, H=Fraction(h_str), eps=eps, lam=lam)
    n, b = _load_or_build_enumeration(x, cfg.window_top, cache_path)
    keep = n <= cfg.window_top
    rep = variance_report(cfg, enum=(n[keep], b[keep]))
    return rep.as_dict()


def run_variance_grid(
    x: int,
    h_grid: list[Fraction],
    eps: float,
    lam: float | None = None,
    *,
    cache_path: str | None = None,
    threads: int = 1,
) -> tuple[list[VarianceReport], list[Fraction], float | None]:
    """One VarianceReport per admissible H, sharing one enumeration cache.

    H outside (X^0.01, X^0.25) is skipped with a warning.  Returns
    (reports, skipped H values, log-log slope of total vs H or None).
    """
    if not h_grid:
        raise ValueError("H grid is empty")
    admitted = [h for h in h_grid if _admissible(x, h)]
    skipped = [h for h in h_grid if not _admissible(x, h)]
    for h in skipped:
        print(f"warning: H={h} outside admissible window (X^0.01, X^0.25); skipped", file=sys.stderr)
    reports: list[VarianceReport] = []
    if admitted:
        top = max(
            interval_upper_bound(2 * x, h) for h in admitted
        )
        enum_n, enum_b = _load_or_build_enumeration(x, top, cache_path)
        if threads > 1:
            jobs = [(x, str(h), eps, lam, cache_path) for h in admitted]
            with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
                for rep_dict in pool.map(_grid_variance_job, jobs):
                    reports.append(VarianceReport(**rep_dict))
        else:
            for h in admitted:
                cfg = ExperimentConfig(X=x, H=h, eps=eps, lam=lam)
                keep = enum_n <= cfg.window_top
                reports.append(variance_report(cfg, enum=(enum_n[keep], enum_b[keep])))
    slope = None
    if len(reports) >= 2:
        slope = float(
            np.polyfit(np.log([r.H for r in reports]), np.log([r.total for r in reports]), 1)[0]
        )
    return reports, skipped, slope


def run_diagonal_grid(
    h_grid: list[Fraction], eps: float, *, tolerance: float = 1e-8
) -> list[dict]:
    """Per-H diagonal sum, prediction c_inf * H^(2/3), and convergence columns."""
    if not h_grid:
        raise ValueError("H grid is empty")
    rows = []
    c_inf = asymptotics.c_infinity()
    for h in h_grid:
        hf = float(h)
        params = asymptotics.DiagonalParams(H=hf, eps=eps, target_rel_error=tolerance)
        value = asymptotics.diagonal_sum(params)
        predicted = c_inf * hf ** (2.0 / 3.0)
        ratio = value / predicted
        rows.append(
            {
                "H": hf,
                "value": value,
                "predicted": predicted,
                "ratio": ratio,
                "abs_dev": abs(ratio - 1.0),
                "envelope": hf ** (-eps / 6.0),
                "degenerate": h.denominator == 1,
            }
        )
    return rows


def emit_plotdata(results: list[VarianceReport], path: str, fmt: str = "csv") -> str:
    """Gnuplot-ready columns (log H, log variance, log predicted)."""
    if fmt != "csv":
        raise ValueError(f"unsupported plotdata format {fmt!r}")
    if not results:
        raise ValueError("no results to emit")
    lines = ["log_H,log_variance,log_predicted"]
    for rep in results:
        lines.append(
            ",".join([fmt12(math.log(rep.H)), fmt12(math.log(rep.total)), fmt12(math.log(rep.predicted))])
        )
    _write_text(path, "\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_count(args) -> int:
    q = count_upto(args.x)
    if args.bg:
        bg2 = bg_approx(float(args.x))
        row = ",".join([str(args.x), str(q), fmt12(bg2), fmt12(q - bg2)])
    else:
        row = ",".join([str(args.x), str(q)])
    _write_text(args.out, row + "\n")
    return 0


def _cmd_enumerate(args) -> int:
    a, b, n = enumerate_squarefull_arrays(args.lo, args.hi)
    if args.out:
        write_enumeration_cache(args.out, args.lo, args.hi, (a, b, n), fmt=args.cache_format)
    else:
        lines = [f"{int(ai)},{int(bi)},{int(ni)}" for ai, bi, ni in zip(a, b, n)]
        _write_text(None, "\n".join([f"{args.lo},{args.hi},1"] + lines) + "\n")
    return 0


def _cmd_variance(args) -> int:
    cfg = ExperimentConfig(X=args.X, H=args.H, eps=args.eps, lam=args.lam)
    rep = variance_report(cfg)
    if args.format == "json":
        payload = rep.as_dict()
        if not args.splits:
            for key in ("I1", "I2", "J1", "J2", "cross_bound"):
                payload.pop(key)
        text = json.dumps({k: v for k, v in payload.items()}, indent=2, sort_keys=True) + "\n"
    else:
        text = ",".join(VARIANCE_CSV_COLUMNS) + "\n" + _variance_csv_row(rep) + "\n"
    _write_text(args.out, text)
    return 0


def _cmd_diagonal(args) -> int:
    rows = run_diagonal_grid([args.H], args.eps, tolerance=args.tolerance)
    row = rows[0]
    if row["degenerate"]:
        print(
            "warning: integer H sits on the sinc zeros; the b=1 layer vanishes "
            "identically and the asymptotic comparison is degenerate",
            file=sys.stderr,
        )
    if args.format == "json":
        text = json.dumps({k: row[k] for k in DIAGONAL_CSV_COLUMNS}, indent=2, sort_keys=True) + "\n"
    else:
        text = (
            ",".join(DIAGONAL_CSV_COLUMNS)
            + "\n"
            + ",".join(fmt12(row[k]) for k in DIAGONAL_CSV_COLUMNS)
            + "\n"
        )
    _write_text(args.out, text)
    return 0


def _cmd_constants(args) -> int:
    zc = asymptotics.zeta_constants()
    payload = {k: float(fmt12(v)) for k, v in dataclasses.asdict(zc).items()}
    _write_text(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_verify(args) -> int:
    names = list(analytic_checks.CHECK_SUITES) if args.suite == "all" else [args.suite]
    failed = False
    lines = []
    for name in names:
        for check in analytic_checks.CHECK_SUITES[name]():
            lines.append(json.dumps(check, sort_keys=True))
            failed = failed or not check["pass"]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 1 if failed else 0


def _cmd_grid(args) -> int:
    threads = args.threads or int(os.environ.get(THREADS_ENV, "1"))
    outputs: list[str] = []
    results_index: list[dict] = []
    if args.mode == "variance":
        if args.X is None:
            raise ValueError("grid --mode variance requires --X")
        reports, skipped, slope = run_variance_grid(
            args.X, args.H_grid, args.eps, args.lam, cache_path=args.cache, threads=threads
        )
        if args.format == "json":
            payload = {
                "rows": [r.as_dict() for r in reports],
                "skipped_H": [str(h) for h in skipped],
                "loglog_slope_total_vs_H": slope,
            }
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        else:
            lines = [",".join(VARIANCE_CSV_COLUMNS)]
            lines.extend(_variance_csv_row(r) for r in reports)
            if slope is None:
                lines.append("# loglog_slope_total_vs_H = undefined (fewer than 2 points)")
            else:
                lines.append(f"# loglog_slope_total_vs_H = {fmt12(slope)}")
            text = "\n".join(lines) + "\n"
        _write_text(args.out, text)
        if args.out:
            outputs.append(args.out)
            results_index.append({"file": os.path.basename(args.out), "rows": len(reports)})
            if reports:
                stem = os.path.splitext(args.out)[0]
                outputs.append(emit_plotdata(reports, stem + "_loglog.csv"))
                if args.plot:
                    fig_path = stem + ".png"
                    report.render_variance_grid_figure(reports, slope, fig_path)
                    outputs.append(fig_path)
    else:
        rows = run_diagonal_grid(args.H_grid, args.eps, tolerance=args.tolerance)
        if args.format == "json":
            text = json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n"
        else:
            lines = [",".join(DIAGONAL_CSV_COLUMNS)]
            lines.extend(",".join(fmt12(r[k]) for k in DIAGONAL_CSV_COLUMNS) for r in rows)
            text = "\n".join(lines) + "\n"
        _write_text(args.out, text)
        if args.out:
            outputs.append(args.out)
            results_index.append({"file": os.path.basename(args.out), "rows": len(rows)})
            if args.plot and rows:
                fig_path = os.path.splitext(args.out)[0] + ".png"
                report.render_diagonal_grid_figure(rows, fig_path)
                outputs.append(fig_path)
    if args.out:
        manifest = RunManifest(
            mode=args.mode,
            X=args.X,
            H_grid=[str(h) for h in args.H_grid],
            eps=args.eps,
            lam=args.lam,
            tolerance=args.tolerance,
            threads=threads,
            seed=None,
            cache_path=args.cache,
            toolkit_version=__version__,
            created_utc=datetime.datetime.now(datetime.timezone.utc).isoformat(),
            outputs=outputs,
            results_index=results_index,
        )
        manifest.write(args.out + ".manifest.json")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (defaults to stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--cache", default=None, help="enumeration cache file")
    common.add_argument(
        "--threads", type=int, default=None, help=f"worker count (or ${THREADS_ENV}); default 1"
    )
    common.add_argument("--tolerance", type=float, default=1e-8, help="numeric tolerance knob")

    parser = argparse.ArgumentParser(
        prog="squarefull",
        description="Squarefull numbers: exact counts and short-interval variance experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="exact Q(x)")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--bg", action="store_true", help="add the two-term approximation and error")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("enumerate", parents=[common], help="list squarefull numbers in a range")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--cache-format", choices=["csv", "binary"], default=None)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("variance", parents=[common], help="variance over [X, 2X] for one H")
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--H", type=_parse_h, required=True, help="rational, e.g. 32.5 or 65/2")
    p.add_argument("--eps", type=float, default=0.005)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--splits", action="store_true", help="include the b-range split in JSON output")
    p.set_defaults(func=_cmd_variance)

    p = sub.add_parser("diagonal", parents=[common], help="diagonal double sum for one H")
    p.add_argument("--H", type=_parse_h, required=True)
    p.add_argument("--eps", type=float, default=0.005)
    p.set_defaults(func=_cmd_diagonal)

    p = sub.add_parser("constants", parents=[common], help="zeta constants as JSON")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("verify", parents=[common], help="run numeric check suites")
    p.add_argument(
        "--suite", choices=[*analytic_checks.CHECK_SUITES, "all"], default="all"
    )
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("grid", parents=[common], help="variance or diagonal runs over an H grid")
    p.add_argument("--mode", choices=["variance", "diagonal"], default="variance")
    p.add_argument("--X", type=int, default=None)
    p.add_argument("--H-grid", type=_parse_h_grid, required=True, help="comma-separated rationals")
    p.add_argument("--eps", type=float, default=0.005)
    p.add_argument("--lam", type=float, default=None)
    plot = p.add_mutually_exclusive_group()
    plot.add_argument("--plot", dest="plot", action="store_true", default=True)
    plot.add_argument("--no-plot", dest="plot", action="store_false")
    p.set_defaults(func=_cmd_grid)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CacheIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
