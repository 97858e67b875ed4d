"""Command line front end: ``polya-order {pmf,eval,verify,curve,partition}``.

Exit codes: 0 success, 1 a verification or monotonicity check failed,
2 invalid parameters or configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import operators as ops
from .interlace import build_partition
from .ordering_verify import (
    DEFAULT_TOLERANCES,
    ConfigError,
    SweepConfig,
    default_config,
    parse_c_grid,
    run_sweep,
)
from .polya_core import InvalidParams, PolyaParams, StandardParams, pmf


def _fmt(v: float) -> str:
    return f"{float(v):.16e}"


def _fail(msg: str, code: int = 2) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_pmf(args) -> int:
    try:
        if args.x is not None:
            if args.a is not None or args.b is not None:
                return _fail("give either --x or --a/--b, not both")
            params = StandardParams(args.n, args.x, args.c).polya()
        else:
            if args.a is None or args.b is None:
                return _fail("give --x or both --a and --b")
            params = PolyaParams(args.n, args.a, args.b, args.c)
        dist = pmf(params)
    except InvalidParams as exc:
        return _fail(str(exc))
    rows = []
    cum = 0.0
    for k, p in enumerate(dist.probs):
        cum += p
        rows.append((k, p, cum))
    if args.json:
        print(json.dumps({
            "n": params.n, "a": params.a, "b": params.b, "c": params.c,
            "pmf": [p for _, p, _ in rows], "cdf": [c for _, _, c in rows],
        }))
    elif args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(("k", "p", "cumulative"))
        for k, p, c in rows:
            w.writerow((k, _fmt(p), _fmt(c)))
    else:
        print(f"{'k':>4}  {'p_k':>22}  {'cumulative':>22}")
        for k, p, c in rows:
            print(f"{k:>4}  {p:>22.17g}  {c:>22.17g}")
    return 0


def cmd_eval(args) -> int:
    try:
        f = ops.get_function(args.f)
    except KeyError as exc:
        return _fail(str(exc.args[0]))
    needs_c = args.op in ("stancu", "general")
    if needs_c and args.c is None:
        return _fail(f"--c is required for --op {args.op}")
    if not needs_c and args.c is not None:
        return _fail(f"--c is not accepted for --op {args.op}")
    try:
        if args.op == "bernstein":
            res = ops.bernstein(f, args.n, args.x)
        elif args.op == "rn":
            res = ops.r_n(f, args.n, args.x)
        elif args.op == "stancu":
            res = ops.stancu(f, args.n, args.x, args.c)
        else:
            a = args.x if args.a is None else args.a
            b = 1 - args.x if args.b is None else args.b
            res = ops.apply_general(f, args.n, args.x, a, b, args.c)
    except InvalidParams as exc:
        return _fail(str(exc))
    print(f"operator {res.operator}  n={res.n}  x={res.x!r}  c={float(res.c)!r}")
    print(f"value  {res.value:.17g}")
    print(f"f(x)   {res.fx:.17g}")
    print(f"error  {res.error:.17g}")
    return 0


def _load_config(path):
    return default_config() if path is None else SweepConfig.load(path)


def cmd_verify(args) -> int:
    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        return _fail(str(exc))
    if "error-monotone" in config.checks:
        bad = [fid for fid in config.function_ids if not ops.REGISTRY[fid].is_convex]
        if bad:
            return _fail(f"error-monotone check needs convex functions; rejected: {', '.join(bad)}")
    report = run_sweep(config, jobs=args.jobs)
    text = report.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(report.summary(), file=sys.stderr if not args.out else sys.stdout)
    return 0 if report.failures == 0 else 1


def cmd_curve(args) -> int:
    try:
        f = ops.get_function(args.f)
    except KeyError as exc:
        return _fail(str(exc.args[0]))
    try:
        grid = sorted(parse_c_grid(args.c_grid, args.n, args.x))
        rows = [(c, ops.stancu(f, args.n, args.x, c)) for c in grid]
    except (InvalidParams, ValueError, ConfigError) as exc:
        return _fail(str(exc))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("c", "value", "error"))
    errors = []
    for c, res in rows:
        err = abs(res.error)
        errors.append(err)
        w.writerow((_fmt(c), _fmt(res.value), _fmt(err)))
    if f.is_convex:
        tol = DEFAULT_TOLERANCES["margin"]
        for (c1, e1), (c2, e2) in zip(zip(grid, errors), zip(grid[1:], errors[1:])):
            if e2 - e1 < -tol:
                return _fail(f"error decreased between c={c1!r} and c={c2!r}: {e1!r} -> {e2!r}", 1)
    return 0


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def cmd_partition(args) -> int:
    try:
        part = build_partition(args.n, args.k, args.x)
    except InvalidParams as exc:
        return _fail(str(exc))
    print(f"n={part.n} k={part.k} x={part.x}")
    print("n_i  ", " ".join(map(str, part.n_seq)))
    print("m_i  ", " ".join(map(str, part.m_seq)))
    print("raw n", " ".join(map(str, part.raw_n)))
    print("raw m", " ".join(map(str, part.raw_m)))
    if part.remap:
        print("remap", " ".join(f"{k}->{v}" for k, v in sorted(part.remap.items())))
    return 0 if part.is_partition() and part.bounds_hold() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polya-order", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", help="print a Pólya pmf")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--c", type=float, default=0.0)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("eval", help="evaluate an operator at one point")
    p.add_argument("--f", required=True, help=f"one of {', '.join(ops.REGISTRY)}")
    p.add_argument("--op", required=True, choices=("bernstein", "stancu", "rn", "general"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--a", type=float, help="white mass for --op general (default x)")
    p.add_argument("--b", type=float, help="black mass for --op general (default 1-x)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run a verification sweep")
    p.add_argument("config", nargs="?", help="JSON sweep config (default: shipped config)")
    p.add_argument("--out", help="CSV report path (default: stdout)")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes; defaults to $POLYA_ORDER_JOBS (0 = all cores)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curve", help="CSV of Stancu value and error along a c grid")
    p.add_argument("--f", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--c-grid", required=True, help="comma list or auto:N")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("partition", help="interlacing partition for rational x")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=_rational, required=True, help="exact rational, e.g. 2/5")
    p.set_defaults(func=cmd_partition)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
