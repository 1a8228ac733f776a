"""Command-line interface.

Subcommands cover single-shot shift values (ds, rds), the full measure
report (compare), feasible-set tools (card, enum, sample, uniq), and the
correlation experiments (experiment, fork). Data goes to stdout or the
selected output file; diagnostics go to stderr; the exit code is 0 only
when no error was emitted. Machine formats render numbers with 12
significant digits, human text with 4.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .distributions import (
    DistributionError,
    FrequencyDistribution,
    cumulate,
    parse_distributions,
)
from .experiments import (
    ExperimentConfig,
    export_fork_data,
    run_experiment,
)
from .feasible import (
    DEFAULT_CAP,
    audit_uniqueness,
    audit_uniqueness_default,
    cardinality,
    enumerate_members,
    sample_uniform,
)
from .measures import MEASURE_NAMES, compare_all
from .shift import ds, ds_linear, ds_with_exponent, rds


def _machine(x: float) -> str:
    return format(float(x), ".12g")


def _human(x: float) -> str:
    return format(float(x), ".4g")


def _round12(value):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(value, float):
        return float(_machine(value))
    if isinstance(value, dict):
        return {k: _round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round12(v) for v in value]
    return value


def _dump_json(payload) -> str:
    return json.dumps(_round12(payload), indent=2) + "\n"


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _default_threads() -> int:
    raw = os.environ.get("DISTSHIFT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load_single(inline: str | None, path: str | None, fmt: str, label: str) -> FrequencyDistribution:
    if (inline is None) == (path is None):
        raise DistributionError(f"provide exactly one of an inline value or a file for {label}")
    if inline is not None:
        dists = parse_distributions(inline, "csv")
    else:
        dists = parse_distributions(Path(path).read_text(encoding="utf-8"), fmt)
    if len(dists) != 1:
        raise DistributionError(f"{label} must contain exactly one distribution, found {len(dists)}")
    return dists[0]


def _check_expectations(f: FrequencyDistribution, args) -> None:
    expect_n = getattr(args, "expect_n", None)
    expect_k = getattr(args, "expect_k", None)
    if expect_n is not None and f.n != expect_n:
        raise DistributionError(f"expected n={expect_n}, parsed n={f.n}")
    if expect_k is not None and f.k != expect_k:
        raise DistributionError(f"expected k={expect_k}, parsed k={f.k}")


def _cmd_ds(args) -> int:
    f = _load_single(args.inline, args.input, args.input_format, "input")
    _check_expectations(f, args)
    F = cumulate(f)
    if args.linear:
        value = ds_linear(F)
    elif args.z is not None:
        value = ds_with_exponent(F, args.z)
    else:
        value = ds(F)
    if args.format == "json":
        _write_output(
            _dump_json({"ds": value.ds, "z_used": value.z_used, "n": value.n, "k": value.k}),
            args.out,
        )
    else:
        _write_output(
            f"ds = {_human(value.ds)}  (z = {_human(value.z_used)}, n = {value.n}, k = {value.k})\n",
            args.out,
        )
    return 0


def _cmd_rds(args) -> int:
    f1 = _load_single(args.a, args.a_file, args.input_format, "--a")
    f2 = _load_single(args.b, args.b_file, args.input_format, "--b")
    value = rds(cumulate(f1), cumulate(f2), allow_unequal_k=args.allow_unequal_k)
    unvalidated = args.allow_unequal_k and f1.k != f2.k
    if args.format == "json":
        payload = {"rds": value, "k1": f1.k, "k2": f2.k}
        if unvalidated:
            payload["unvalidated_unequal_k"] = True
        _write_output(_dump_json(payload), args.out)
    else:
        note = "  [unvalidated: unequal k]" if unvalidated else ""
        _write_output(f"rds = {_human(value)}{note}\n", args.out)
    return 0


def _cmd_compare(args) -> int:
    f1 = _load_single(args.a, args.a_file, args.input_format, "--a")
    f2 = _load_single(args.b, args.b_file, args.input_format, "--b")
    report = compare_all(f1, f2, lenient_chi_square=args.lenient_chi_square)
    fields = ["rds"] + list(MEASURE_NAMES)
    values = {name: getattr(report, name) for name in fields}
    if args.format == "json":
        payload = {
            name: ("undefined" if v is None else v) for name, v in values.items()
        }
        payload["undefined_flags"] = sorted(report.undefined_flags)
        _write_output(_dump_json(payload), args.out)
    elif args.format == "csv":
        header = ",".join(fields)
        row = ",".join("undefined" if values[n] is None else _machine(values[n]) for n in fields)
        _write_output(header + "\n" + row + "\n", args.out)
    else:
        lines = [
            f"{name:18s} {'undefined' if v is None else _human(v)}"
            for name, v in values.items()
        ]
        _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_card(args) -> int:
    _write_output(f"{cardinality(args.n, args.k)}\n", args.out)
    return 0


def _cmd_enum(args) -> int:
    stream = enumerate_members(args.n, args.k, cap=args.cap)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
    try:
        for member in stream:
            if args.cumulative:
                row = cumulate(member).totals
            else:
                row = member.counts
            out.write(",".join(str(c) for c in row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_sample(args) -> int:
    import numpy as np

    rng = np.random.default_rng(args.seed)
    lines = []
    for _ in range(args.count):
        member = sample_uniform(args.n, args.k, rng)
        lines.append(",".join(str(c) for c in member.counts))
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_uniq(args) -> int:
    if args.z is None:
        report = audit_uniqueness_default(
            args.n, args.k, cap=args.cap, max_collisions=args.max_collisions
        )
    else:
        report = audit_uniqueness(
            args.n, args.k, args.z, cap=args.cap, max_collisions=args.max_collisions
        )
    if args.format == "json":
        _write_output(_dump_json(report.to_json_dict()), args.out)
    elif args.format == "csv":
        _write_output("n,k,z,total,unique,suspects\n" + report.csv_summary() + "\n", args.out)
    else:
        lines = [
            f"{report.unique_values} unique / {report.total} "
            f"(n={report.n}, k={report.k}, z={_human(report.z)})"
        ]
        if report.suspect_count:
            lines.append(f"suspect near-collisions: {report.suspect_count}")
        for rec in report.collisions:
            members = "; ".join("[" + ",".join(map(str, m)) + "]" for m in rec.members)
            lines.append(f"value {_human(rec.value)} shared by {rec.count}: {members}")
        _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _experiment_config(args) -> ExperimentConfig:
    source = "feasible_set" if args.source == "feasible" else "poisson"
    return ExperimentConfig(
        source=source,
        n=args.n,
        k=args.k,
        num_pairs=args.pairs,
        seed=args.seed,
        lam=getattr(args, "lam", None),
        undefined_policy=args.undefined_policy,
    )


def _cmd_experiment(args) -> int:
    table = run_experiment(_experiment_config(args), threads=args.threads)
    _write_output(table.r2_csv(), args.csv_out)
    if args.json_out is not None:
        _write_output(_dump_json(table.to_json_dict()), args.json_out)
    return 0


def _cmd_fork(args) -> int:
    table = run_experiment(_experiment_config(args), threads=args.threads)
    rows = export_fork_data(table, args.measure)
    lines = [f"{args.measure},rds"]
    for value, signed in rows:
        cell = "undefined" if value is None else _machine(value)
        lines.append(f"{cell},{_machine(signed)}")
    _write_output("\n".join(lines) + "\n", args.out)
    if args.svg is not None:
        points = [(v, r) for v, r in rows if v is not None]
        Path(args.svg).write_text(_scatter_svg(points, args.measure, "rds"), encoding="utf-8")
    return 0


def _scatter_svg(points: list[tuple[float, float]], xlabel: str, ylabel: str) -> str:
    """Minimal scatter plot: one circle per point, linear axes, labels."""
    width, height, margin = 640, 480, 60
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0

    def sx(x: float) -> float:
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" text-anchor="middle">{xlabel}</text>',
        f'<text x="15" y="{height // 2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {height // 2})">{ylabel}</text>',
        f'<text x="{margin}" y="{height - margin + 20}" text-anchor="middle">{_human(xmin)}</text>',
        f'<text x="{width - margin}" y="{height - margin + 20}" '
        f'text-anchor="middle">{_human(xmax)}</text>',
        f'<text x="{margin - 10}" y="{height - margin}" text-anchor="end">{_human(ymin)}</text>',
        f'<text x="{margin - 10}" y="{margin}" text-anchor="end">{_human(ymax)}</text>',
    ]
    for x, y in points:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2" fill="steelblue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _add_output_options(p: argparse.ArgumentParser, formats=("text", "json")) -> None:
    p.add_argument("--format", choices=formats, default="text", help="output format")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def _add_pair_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", help="first distribution, inline comma-separated counts")
    p.add_argument("--a-file", help="first distribution read from a file")
    p.add_argument("--b", help="second distribution, inline comma-separated counts")
    p.add_argument("--b-file", help="second distribution read from a file")
    p.add_argument(
        "--input-format", choices=("csv", "json"), default="csv", help="format of input files"
    )


def _add_experiment_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--source", choices=("feasible", "poisson"), required=True)
    p.add_argument("-n", type=int, required=True, help="observations per distribution")
    p.add_argument("-k", type=int, required=True, help="number of bins")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="Poisson rate")
    p.add_argument("--pairs", type=int, required=True, help="number of random pairs")
    p.add_argument("--seed", type=_parse_seed, required=True, help="unsigned 64-bit seed")
    p.add_argument(
        "--undefined-policy", dest="undefined_policy", choices=("drop", "fail"), default="drop"
    )
    p.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="worker processes (default: $DISTSHIFT_THREADS or 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distshift",
        description="Distributional shift and comparison measures for discrete "
        "frequency distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ds", help="distributional shift of one distribution")
    p.add_argument("--inline", help="inline comma-separated counts")
    p.add_argument("--input", help="read the distribution from a file")
    p.add_argument(
        "--input-format", choices=("csv", "json"), default="csv", help="format of input files"
    )
    group = p.add_mutually_exclusive_group()
    group.add_argument("--linear", action="store_true", help="use z = 1")
    group.add_argument("--z", type=float, default=None, help="explicit exponent z > 0")
    p.add_argument("--expect-n", type=int, default=None, help="cross-check parsed n")
    p.add_argument("--expect-k", type=int, default=None, help="cross-check parsed k")
    _add_output_options(p)
    p.set_defaults(func=_cmd_ds)

    p = sub.add_parser("rds", help="relative shift of two distributions")
    _add_pair_inputs(p)
    p.add_argument(
        "--allow-unequal-k",
        action="store_true",
        help="permit different bin counts (unvalidated comparison)",
    )
    _add_output_options(p)
    p.set_defaults(func=_cmd_rds)

    p = sub.add_parser("compare", help="all pairwise measures for two distributions")
    _add_pair_inputs(p)
    p.add_argument(
        "--lenient-chi-square",
        action="store_true",
        help="treat both-zero bins as 0 terms in chi-square instead of undefined",
    )
    _add_output_options(p, formats=("text", "json", "csv"))
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("card", help="exact cardinality of the feasible set A(n, k)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_card)

    p = sub.add_parser("enum", help="stream every member of A(n, k) as CSV rows")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--cumulative", action="store_true", help="emit cumulative totals")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="refuse sets larger than this")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_enum)

    p = sub.add_parser("sample", help="draw uniform random members of A(n, k)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--count", type=int, default=1, help="number of draws")
    p.add_argument("--seed", type=_parse_seed, required=True, help="unsigned 64-bit seed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("uniq", help="audit uniqueness of shift values over A(n, k)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--z", type=float, default=None, help="exponent (default: (k+1)/k)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="refuse sets larger than this")
    p.add_argument("--max-collisions", type=int, default=20, help="collision records to keep")
    _add_output_options(p, formats=("text", "json", "csv"))
    p.set_defaults(func=_cmd_uniq)

    p = sub.add_parser("experiment", help="run a correlation experiment over random pairs")
    _add_experiment_options(p)
    p.add_argument("--csv-out", default=None, help="r-squared matrix CSV path (default: stdout)")
    p.add_argument("--json-out", default=None, help="full table JSON path")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("fork", help="export (measure, signed rds) scatter data")
    _add_experiment_options(p)
    p.add_argument("--measure", required=True, help=f"one of {', '.join(MEASURE_NAMES)}")
    p.add_argument("--svg", default=None, help="also write a minimal scatter SVG here")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_fork)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DistributionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
