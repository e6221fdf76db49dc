"""Command-line surface: integral evaluators and detection curve generators.

Output contract: CSV (``.`` decimal separator, ``,`` field separator, ``\\n``
line endings, header always present) or JSON; numbers are rendered with
``%.{precision}g`` so identical flags always produce byte-identical files;
failed sweep rows carry the lowercase sentinel ``nan`` (a quoted string in
JSON, which has no nan literal).  Diagnostics go to stderr.

Exit codes: 0 success, 2 invalid input, 3 convergence failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import detection, fading, integrals
from .errors import ConvergenceError, DomainError, InstabilityError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3
EXIT_IO = 4


def _fmt(value: float, precision: int) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.{precision}g}"


def _json_token(value, precision: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return '"nan"'  # JSON has no nan literal; keep the sentinel lowercase
    return _fmt(value, precision)


def _write_output(text: str, out_path: str) -> None:
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", default="-", help="output path, '-' for stdout")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--precision", type=int, default=12,
                     help="significant digits for emitted numbers (1..17)")


def _check_precision(parser: argparse.ArgumentParser, precision: int) -> None:
    if not (1 <= precision <= 17):
        parser.error(f"--precision must be in [1, 17], got {precision}")


def _rows_to_csv(header: list[str], rows: list[list], precision: int) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else _fmt(cell, precision)
            for cell in row
        ))
    return "\n".join(lines) + "\n"


def _rows_to_json(header: list[str], rows: list[list], precision: int) -> str:
    cols = ", ".join(f'"{h}"' for h in header)
    out = ['{"columns": [' + cols + '], "rows": [']
    body = []
    for row in rows:
        body.append("[" + ", ".join(_json_token(c, precision) for c in row) + "]")
    out.append(", ".join(body))
    out.append("]}\n")
    return "".join(out)


def _cmd_integral(args, parser) -> int:
    _check_precision(parser, args.precision)
    if args.tol <= 0.0:
        parser.error(f"--tol must be > 0, got {args.tol}")
    params = integrals.IntegralParams(a=args.a, b=args.b, k=args.k, m=args.m, p=args.p)
    methods = ["closed", "series", "quadrature"] if args.method == "all" else [args.method]

    records = []  # (method, value, error_bound or None, terms_used or None)
    for method in methods:
        if method == "closed":
            records.append(("closed", integrals.closed_form(params), None, None))
        elif method == "series":
            res = integrals.series(params, tol=args.tol)
            records.append(("series", res.value, res.error_bound, res.terms_used))
        else:
            value = integrals.quadrature_oracle(params, abs_tol=args.tol)
            records.append(("quadrature", value, None, None))

    p = args.precision
    if args.format == "csv":
        rows = [
            [m, _fmt(v, p),
             "" if eb is None else _fmt(eb, p),
             "" if tu is None else str(tu)]
            for m, v, eb, tu in records
        ]
        text = _rows_to_csv(["method", "value", "error_bound", "terms_used"], rows, p)
    else:
        parts = []
        for m, v, eb, tu in records:
            fields = [f'"method": "{m}"', f'"value": {_json_token(v, p)}']
            if eb is not None:
                fields.append(f'"error_bound": {_json_token(eb, p)}')
            if tu is not None:
                fields.append(f'"terms_used": {tu}')
            parts.append("{" + ", ".join(fields) + "}")
        text = '{"records": [' + ", ".join(parts) + "]}\n"
    _write_output(text, args.out)
    return EXIT_OK


def _cmd_detect_pd_curve(args, parser) -> int:
    _check_precision(parser, args.precision)
    if not (0.0 < args.pf < 1.0):
        parser.error(f"--pf must be in (0, 1), got {args.pf}")
    if args.snr_db_step <= 0.0:
        parser.error(f"--snr-db-step must be > 0, got {args.snr_db_step}")
    if args.snr_db_start > args.snr_db_stop:
        parser.error("--snr-db-start must not exceed --snr-db-stop")
    params = fading.derive_params(args.fading_format, args.eta, args.mu)
    n = int((args.snr_db_stop - args.snr_db_start) / args.snr_db_step + 1e-9) + 1
    grid = [args.snr_db_start + i * args.snr_db_step for i in range(n)]

    table = detection.pd_vs_snr_curve(args.u, args.pf, params, grid)
    for note in table.notes:
        print(f"warning: row failed: {note}", file=sys.stderr)
    if all(math.isnan(r.analytic) for r in table.rows):
        print("error: every row of the sweep failed", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    header = ["snr_db", "pd_analytic", "pd_oracle", "abs_diff"]
    rows = []
    for r in table.rows:
        diff = abs(r.analytic - r.oracle)
        rows.append([r.abscissa, r.analytic, r.oracle, diff])
    text = (_rows_to_csv if args.format == "csv" else _rows_to_json)(
        header, rows, args.precision
    )
    _write_output(text, args.out)
    return EXIT_OK


def _cmd_detect_roc(args, parser) -> int:
    _check_precision(parser, args.precision)
    if args.pf_points < 2:
        parser.error(f"--pf-points must be >= 2, got {args.pf_points}")
    if not (0.0 < args.pf_start < args.pf_stop < 1.0):
        parser.error(
            f"require 0 < --pf-start < --pf-stop < 1, got "
            f"{args.pf_start} .. {args.pf_stop}"
        )
    params = fading.derive_params(args.fading_format, args.eta, args.mu)
    ln_a, ln_b = math.log(args.pf_start), math.log(args.pf_stop)
    npts = args.pf_points
    grid = [math.exp(ln_a + i * (ln_b - ln_a) / (npts - 1)) for i in range(npts)]

    points = detection.roc_curve(args.u, args.snr_db, params, grid)
    n_bad = sum(1 for pt in points if math.isnan(pt.pd))
    for pt in points:
        if math.isnan(pt.pd):
            print(f"warning: row failed: pf={pt.pf:g}", file=sys.stderr)
    if n_bad == len(points):
        print("error: every row of the sweep failed", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    rows = [[pt.pf, pt.pd, pt.pm] for pt in points]
    text = (_rows_to_csv if args.format == "csv" else _rows_to_json)(
        ["pf", "pd", "pm"], rows, args.precision
    )
    _write_output(text, args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edsense",
        description="Marcum-Q integral evaluators and energy-detection "
                    "performance curves over two-format fading",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("integral", help="evaluate the weighted Marcum-Q integral")
    for flag in ("a", "b", "k", "m", "p"):
        p_int.add_argument(f"--{flag}", type=float, required=True)
    p_int.add_argument("--method", choices=["closed", "series", "quadrature", "all"],
                       default="all")
    p_int.add_argument("--tol", type=float, default=1e-10)
    _add_output_flags(p_int)
    p_int.set_defaults(func=_cmd_integral)

    p_curve = sub.add_parser("detect-pd-curve",
                             help="average detection probability vs average SNR")
    p_curve.add_argument("--u", type=float, required=True)
    p_curve.add_argument("--pf", type=float, required=True)
    p_curve.add_argument("--eta", type=float, required=True)
    p_curve.add_argument("--mu", type=float, required=True)
    p_curve.add_argument("--fading-format", type=int, choices=[1, 2], required=True)
    p_curve.add_argument("--snr-db-start", type=float, required=True)
    p_curve.add_argument("--snr-db-stop", type=float, required=True)
    p_curve.add_argument("--snr-db-step", type=float, required=True)
    _add_output_flags(p_curve)
    p_curve.set_defaults(func=_cmd_detect_pd_curve)

    p_roc = sub.add_parser("detect-roc",
                           help="complementary ROC at fixed average SNR")
    p_roc.add_argument("--u", type=float, required=True)
    p_roc.add_argument("--snr-db", type=float, required=True)
    p_roc.add_argument("--eta", type=float, required=True)
    p_roc.add_argument("--mu", type=float, required=True)
    p_roc.add_argument("--fading-format", type=int, choices=[1, 2], required=True)
    p_roc.add_argument("--pf-start", type=float, required=True)
    p_roc.add_argument("--pf-stop", type=float, required=True)
    p_roc.add_argument("--pf-points", type=int, required=True)
    _add_output_flags(p_roc)
    p_roc.set_defaults(func=_cmd_detect_roc)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except DomainError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, InstabilityError) as exc:
        print(f"error: convergence failure: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"error: i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
