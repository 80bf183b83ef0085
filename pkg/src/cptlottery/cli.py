"""Command-line front end: country presets, design runs (unconstrained,
fixed-price, utility-floor), prize-table rendering, and machine-readable
export."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from .cpt import CptParams, expected_utility_grouped
from .engine import (
    STATUS_UNBOUNDED,
    design_optimal,
    expand_design,
    max_buyer_utility,
)
from .fixed_price import design_fixed_price, design_fixed_price_fast
from .oracle import OracleConfig, oracle_design, oracle_fixed
from .presets import PRESETS

_PARAM_FLAGS = ("alpha", "beta", "lam", "gamma_plus", "gamma_minus")


def _add_param_flags(parser):
    parser.add_argument("--preset", choices=sorted(PRESETS), help="country parameter preset")
    parser.add_argument("--alpha", type=float, help="gain curvature exponent in (0,1)")
    parser.add_argument("--beta", type=float, help="loss curvature exponent in (0,1)")
    parser.add_argument("--lambda", dest="lam", type=float, help="loss aversion multiplier > 0")
    parser.add_argument("--gamma-plus", type=float, help="gain weighting curvature in (0,1]")
    parser.add_argument("--gamma-minus", type=float, help="loss weighting curvature in (0,1]")


def _resolve_params(args, parser) -> CptParams:
    preset = PRESETS[args.preset] if args.preset else None
    fields = {}
    for name in _PARAM_FLAGS:
        override = getattr(args, name)
        if override is not None:
            fields[name] = override
        elif preset is not None:
            fields[name] = getattr(preset.params, name)
        else:
            flag = "--" + ("lambda" if name == "lam" else name.replace("_", "-"))
            parser.error(f"{flag} is required when no --preset is given")
    try:
        return CptParams(**fields)
    except ValueError as exc:
        parser.error(str(exc))


def _parse_count(text: str, parser) -> int:
    try:
        x = float(text)
    except ValueError:
        parser.error(f"invalid ticket count {text!r}")
    if not (x == int(x) and x >= 2):
        parser.error(f"ticket count must be an integer >= 2, got {text!r}")
    return int(x)


def _bucket_label(lo: float, hi: float) -> str:
    if lo == 0.0:
        return ">0 - 10"
    return f"10^{round(math.log10(lo))} - 10^{round(math.log10(hi))}"


def render_table(report: dict) -> str:
    """Human-readable report rendered purely from the JSON-shaped dict, so a
    parsed export reproduces the table byte for byte."""
    lines = []
    lines.append(f"{'Prize':<18}{'Number':>16}  Odds")
    n = report["n"]
    for b in reversed(report["buckets"]):
        label = _bucket_label(b["lo"], b["hi"])
        lines.append(f"{label:<18}{b['count']:>16,}  1 in {n / b['count']:,.2f}")
    if report["zero_count"]:
        lines.append(
            f"{'0':<18}{report['zero_count']:>16,}  1 in {n / report['zero_count']:,.2f}"
        )
    lines.append("")
    lines.append(f"tickets      : {n:,}")
    lines.append(f"ticket price : {report['ticket_price']:.6g}")
    lines.append(f"max prize    : {report['max_prize']:.6g}")
    lines.append(f"gain ratio   : {100.0 * report['gain_ratio']:.4f}%")
    lines.append(f"profit       : {report['profit']:.6g}")
    lines.append(f"status       : {report['status']}")
    if report.get("eps"):
        lines.append(f"utility floor: {report['eps']:.6g}")
    lines.append(f"wall time    : {report['timing_ms']:.1f} ms")
    return "\n".join(lines)


def render_csv(report: dict) -> str:
    """Bucket rows as lo,hi,count with the zero row encoded as lo = hi = 0."""
    lines = ["lo,hi,count"]
    lines.append(f"0,0,{report['zero_count']}")
    for b in report["buckets"]:
        lines.append(f"{b['lo']:.17g},{b['hi']:.17g},{b['count']}")
    return "\n".join(lines)


def _report_dict(params, table, design, timing_ms) -> dict:
    return {
        "params": {
            "alpha": params.alpha,
            "beta": params.beta,
            "lambda": params.lam,
            "gamma_plus": params.gamma_plus,
            "gamma_minus": params.gamma_minus,
        },
        "n": design.n,
        "n_minus": design.n_minus,
        "n_plus": design.n_plus,
        "ticket_price": table.ticket_price,
        "v_star": design.v_star,
        "profit": table.profit,
        "max_prize": table.max_prize,
        "gain_ratio": table.gain_ratio,
        "status": design.status,
        "eps": design.eps,
        "buckets": [{"lo": lo, "hi": hi, "count": c} for lo, hi, c in table.buckets],
        "zero_count": table.zero_count,
        "timing_ms": timing_ms,
    }


def cmd_design(args, parser) -> int:
    params = _resolve_params(args, parser)
    preset = PRESETS[args.preset] if args.preset else None
    if args.n is not None:
        n = _parse_count(args.n, parser)
    elif preset is not None:
        n = preset.default_n
    else:
        parser.error("--n is required when no --preset is given")

    price = args.price
    if price is None and preset is not None:
        price = preset.fixed_price
    if price is not None and price == 0.0:
        price = None  # explicit override back to the unconstrained model
    if price is not None and price < 0.0:
        parser.error("--price must be nonnegative")
    if price is not None and (args.epsilon is not None or args.profit_floor is not None):
        parser.error("--epsilon/--profit-floor apply to the unconstrained model only")
    if args.epsilon is not None and args.profit_floor is not None:
        parser.error("--epsilon and --profit-floor are mutually exclusive")

    t0 = time.perf_counter()
    if price is not None:
        if params.alpha >= params.beta:
            design = design_fixed_price_fast(params, n, -price)
        else:
            design = design_fixed_price(params, n, -price)
    else:
        eps = args.epsilon or 0.0
        if args.profit_floor is not None:
            eps = max_buyer_utility(params, n, args.profit_floor)
        design = design_optimal(params, n, eps=eps)

    if design.status == STATUS_UNBOUNDED:
        regime = (
            "loss curvature is flatter than gain curvature (alpha > beta)"
            if params.alpha > params.beta
            else "equal exponents with a dominant loss coefficient"
        )
        print(
            "design is unbounded: the seller's profit grows without limit "
            f"because {regime}; fix the ticket price (--price) to bound it",
            file=sys.stderr,
        )
        return 3

    table = expand_design(design)
    timing_ms = 1000.0 * (time.perf_counter() - t0)
    report = _report_dict(params, table, design, timing_ms)

    if args.format == "json":
        text = json.dumps(report, indent=2)
    elif args.format == "csv":
        text = render_csv(report)
    else:
        text = render_table(report)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0


def _read_lottery_csv(path, parser):
    levels, counts = [], []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:2]] != ["outcome", "count"]:
                print(f"{path}: line 1: expected header 'outcome,count'", file=sys.stderr)
                raise SystemExit(2)
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                try:
                    levels.append(float(row[0]))
                    counts.append(int(row[1]))
                    if counts[-1] <= 0:
                        raise ValueError("count must be positive")
                except (ValueError, IndexError) as exc:
                    print(f"{path}: line {lineno}: {exc}", file=sys.stderr)
                    raise SystemExit(2)
    except OSError as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    if not levels:
        print(f"{path}: no outcome rows", file=sys.stderr)
        raise SystemExit(2)
    return np.asarray(levels), np.asarray(counts)


def cmd_eval(args, parser) -> int:
    params = _resolve_params(args, parser)
    levels, counts = _read_lottery_csv(args.file, parser)
    eu = expected_utility_grouped(params, levels, counts)
    profit = float(np.sum(counts * (-levels)))
    print(f"tickets                : {int(counts.sum()):,}")
    print(f"expected utility/ticket: {eu:.12g}")
    print(f"seller profit          : {profit:.6g}")
    return 0


def cmd_oracle(args, parser) -> int:
    params = _resolve_params(args, parser)
    n = _parse_count(args.n, parser) if args.n else 4
    if n > 8:
        print("oracle comparisons are limited to n <= 8", file=sys.stderr)
        return 2
    config = OracleConfig(
        grid_points=args.grid_points, sample_count=20000, multistarts=10, seed=args.seed
    )
    if args.price is not None:
        if args.price <= 0:
            parser.error("--price must be positive")
        ora = oracle_fixed(params, n, -args.price, config)
        if params.alpha >= params.beta:
            eng = design_fixed_price_fast(params, n, -args.price)
        else:
            eng = design_fixed_price(params, n, -args.price)
    else:
        ora = oracle_design(params, n, config)
        eng = design_optimal(params, n)
    print(f"{'field':<14}{'engine':>18}{'oracle':>18}{'delta':>14}")
    rows = [
        ("status", eng.status, ora.status, ""),
        ("n_minus", eng.n_minus, ora.n_minus, eng.n_minus - ora.n_minus),
        ("n_plus", eng.n_plus, ora.n_plus, eng.n_plus - ora.n_plus),
    ]
    for name in ("v_star", "ticket_price", "profit"):
        e, o = getattr(eng, name), getattr(ora, name)
        rows.append((name, f"{e:.10g}", f"{o:.10g}", f"{e - o:.3g}"))
    for name, e, o, d in rows:
        print(f"{name:<14}{e!s:>18}{o!s:>18}{d!s:>14}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cptlottery",
        description="Design seller-profit-maximizing lotteries for prospect-theory buyers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="compute an optimal lottery and print its prize table")
    _add_param_flags(p_design)
    p_design.add_argument("--n", help="ticket count (scientific notation accepted, e.g. 1e9)")
    p_design.add_argument(
        "--price",
        type=float,
        help="fix the ticket price (activates the capped-loss model; 0 reverts a preset price)",
    )
    p_design.add_argument("--epsilon", type=float, help="guaranteed buyer utility (>= 0)")
    p_design.add_argument(
        "--profit-floor",
        type=float,
        help="maximize buyer utility subject to this minimum seller profit",
    )
    p_design.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p_design.add_argument("--out", help="also write the report to this path")
    p_design.add_argument("--buckets", choices=["decade"], default="decade")
    p_design.add_argument("--threads", type=int, help="worker threads (default: hardware count)")
    p_design.set_defaults(func=cmd_design)

    p_eval = sub.add_parser("eval", help="evaluate a lottery CSV (outcome,count) for a buyer")
    _add_param_flags(p_eval)
    p_eval.add_argument("file", help="CSV with header outcome,count; outcomes net of price")
    p_eval.set_defaults(func=cmd_eval)

    p_oracle = sub.add_parser("oracle", help="compare the engine against brute force at tiny n")
    _add_param_flags(p_oracle)
    p_oracle.add_argument("--n", help="ticket count (<= 8)")
    p_oracle.add_argument("--price", type=float, help="fixed ticket price")
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--grid-points", type=int, default=20000)
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        import numba

        numba.set_num_threads(max(1, args.threads))
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
