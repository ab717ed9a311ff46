"""Command line interface.

One executable, ten subcommands mapping onto the library surface:

    grid      step function f_n(., p): breakpoints and piece values
    poly      f_n(x, .) as a polynomial in p, with an evaluation table
    mc        Monte Carlo estimate of f_n(x, p) (doom within n steps)
    eventual  doomed / ruined / censored fractions by a horizon
    holder    edge scaling exponent of 1 - f at x -> 2+
    digits    leading-digit histogram of the limit sum
    couple    monotone-coupled pair run (domination + f difference)
    scan      doom fraction vs starting fortune for a rho rule
    blocks    raw block decompositions of sampled paths
    verify    exact invariants: closed form, block sums, digit chain

Outputs embed the run configuration and a timestamp; writes are
byte-reproducible except for that timestamp. CSV is RFC 4180 with LF
line endings, numbers formatted to 17 significant digits (comment
lines with '#' carry the metadata); JSON carries exact values as
strings where the engines are exact.

Exit codes: 0 success, 2 usage error, 3 resource budget exhausted,
4 broken invariant or unreadable data.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .analysis import digit_report, holder_exponent
from .backend import KERNEL_IMPL
from .cache import default_cache_dir, cached_iterate
from .config import SCHEMA_VERSION, RunConfig
from .dyadic import DyadicRational, parse_dyadic, parse_rational, format_rational
from .errors import BudgetError, RuinLabError
from .poly import poly_eval, poly_fn
from .sim import (
    coupled_run,
    mc_eventual,
    mc_ruin_by_n,
    sample_blocks,
    threshold_scan,
    verify_block_sums,
    verify_closed_form,
    verify_z_chain,
)
from .rng import Stream
from .stepfn import parse_x

_G17 = ".17g"


def _fmt(v) -> str:
    """17-significant-digit CSV rendering (integral values print bare)."""
    return format(float(v), _G17)


def _frac_str(fr: Fraction) -> str:
    return format_rational(Fraction(fr))


def _json_default(o):
    if isinstance(o, Fraction):
        return _frac_str(o)
    if isinstance(o, DyadicRational):
        return o.serialize()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o)!r}")


def _emit(args, payload: dict, csv_header, csv_rows):
    """Write payload as JSON or CSV to --out (default stdout)."""
    payload = dict(payload)
    payload["schema_version"] = SCHEMA_VERSION
    payload["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
        buf.write(f"# generated_at: {payload['generated_at']}\n")
        buf.write("# precision: 17 significant digits\n")
        cfg = json.dumps(payload.get("config", {}), sort_keys=True, default=_json_default)
        buf.write(f"# config: {cfg}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_header)
        for row in csv_rows:
            w.writerow(row)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args, **params) -> RunConfig:
    return RunConfig(
        seed=getattr(args, "seed", None),
        mode=getattr(args, "mode", "exact"),
        threads=getattr(args, "threads", 1),
        cache_dir=_cache_dir(args),
        params=params,
    )


def _cache_dir(args):
    return getattr(args, "cache_dir", None) or default_cache_dir()


def _parse_p(args):
    p = parse_rational(args.p) if args.mode == "exact" else float(Fraction(args.p))
    if not 0 <= p <= 1:
        raise ValueError(f"win probability must be in [0, 1], got {args.p}")
    return p


def _parse_prob(s: str) -> float:
    p = float(Fraction(s))
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"win probability must be in [0, 1], got {s}")
    return p


# -- subcommands -----------------------------------------------------------

def cmd_grid(args) -> int:
    p = _parse_p(args)
    sf = cached_iterate(p, args.n, args.mode, _cache_dir(args), args.budget)
    cfg = _config(args, command="grid", p=str(args.p), n=args.n)
    bps = sf.breakpoints()
    rows = []
    prev = None
    for i, b in enumerate(bps):
        if prev is not None:
            mid = (prev + b).halve()
            rows.append([_fmt(float(mid)), _fmt(sf.vals[i])])
        rows.append([_fmt(float(b)), _fmt(sf.vals[i])])
        prev = b
    payload = {
        "config": cfg.to_dict(),
        "function": sf.to_dict(),
        "pieces": len(sf),
    }
    _emit(args, payload, ["x", "f"], rows)
    return 0


def cmd_poly(args) -> int:
    x = parse_dyadic(args.x)
    coeffs = poly_fn(x, args.n)
    grid = [Fraction(i, 20) for i in range(0, 11)]  # 0 .. 1/2
    table = []
    rows = []
    for p in grid:
        v = poly_eval(coeffs, p)
        table.append({"p": _frac_str(p), "value": _frac_str(v), "value_float": float(v)})
        rows.append([_fmt(p), _fmt(v)])
    cfg = _config(args, command="poly", x=x.serialize(), n=args.n)
    payload = {
        "config": cfg.to_dict(),
        "x": x.serialize(),
        "n": args.n,
        "coefficients": [int(c) for c in coeffs],
        "eval": table,
    }
    _emit(args, payload, ["p", "f"], rows)
    return 0


def cmd_mc(args) -> int:
    r = mc_ruin_by_n(parse_dyadic(args.x), _parse_prob(args.p), args.n, args.samples, args.seed, args.threads)
    cfg = _config(args, command="mc", x=args.x, p=args.p, n=args.n, samples=args.samples)
    payload = {"config": cfg.to_dict(), **r}
    rows = [[_fmt(r["estimate"]), _fmt(r["stderr"]), _fmt(r["ci95"][0]), _fmt(r["ci95"][1]), r["samples"]]]
    _emit(args, payload, ["estimate", "stderr", "ci95_lo", "ci95_hi", "samples"], rows)
    return 0


def cmd_eventual(args) -> int:
    r = mc_eventual(parse_dyadic(args.x), _parse_prob(args.p), args.horizon, args.samples, args.seed, args.threads)
    cfg = _config(args, command="eventual", x=args.x, p=args.p, horizon=args.horizon, samples=args.samples)
    payload = {"config": cfg.to_dict(), **r}
    rows = [[_fmt(r["doomed_frac"]), _fmt(r["ruined_frac"]), _fmt(r["censored_frac"]), r["samples"]]]
    _emit(args, payload, ["doomed_frac", "ruined_frac", "censored_frac", "samples"], rows)
    return 0


def cmd_holder(args) -> int:
    fit = holder_exponent(_parse_prob(args.p), args.k_lo, args.k_hi, args.n)
    cfg = _config(args, command="holder", p=args.p, k_lo=args.k_lo, k_hi=args.k_hi, n=fit.n_used)
    payload = {
        "config": cfg.to_dict(),
        "p": fit.p,
        "n": fit.n_used,
        "slopes": [{"k": k, "slope": s} for k, s in fit.slopes],
        "exponent": fit.exponent,
        "k_used": fit.k_used,
    }
    rows = [[k, _fmt(s)] for k, s in fit.slopes]
    _emit(args, payload, ["k", "slope"], rows)
    return 0


def cmd_digits(args) -> int:
    rep = digit_report(
        _parse_prob(args.p), args.k, args.samples,
        guard_bits=args.guard_bits, seed=args.seed,
        config=_config(args, command="digits", p=args.p, k=args.k, samples=args.samples),
    )
    rep.pop("histogram")
    rows = [[d, c] for d, c in enumerate(rep["counts"])]
    _emit(args, rep, ["digit", "count"], rows)
    return 0


def cmd_couple(args) -> int:
    r = coupled_run(parse_dyadic(args.x), _parse_prob(args.p1), _parse_prob(args.p2),
                    args.horizon, args.samples, args.seed, args.threads)
    cfg = _config(args, command="couple", x=args.x, p1=args.p1, p2=args.p2,
                  horizon=args.horizon, samples=args.samples)
    payload = {"config": cfg.to_dict(), **r}
    rows = [[r["domination_violations"], _fmt(r["f_diff_estimate"]),
             _fmt(r["doomed_frac_lo"]), _fmt(r["doomed_frac_hi"]), r["samples"]]]
    _emit(args, payload, ["violations", "f_diff", "doomed_lo", "doomed_hi", "samples"], rows)
    return 0


def cmd_scan(args) -> int:
    xs = []
    x = Fraction(args.x_lo)
    step = Fraction(args.x_step)
    while x <= Fraction(args.x_hi) + Fraction(1, 10**9):
        xs.append(float(x))
        x += step
    rows_data = threshold_scan(float(Fraction(args.rho)), _parse_prob(args.p), xs,
                               args.horizon, args.samples, args.seed, args.threads)
    cfg = _config(args, command="scan", rho=args.rho, p=args.p,
                  x_lo=args.x_lo, x_hi=args.x_hi, horizon=args.horizon, samples=args.samples)
    payload = {"config": cfg.to_dict(), "rows": rows_data}
    rows = [[_fmt(r["x"]), _fmt(r["doomed_frac"]), r["samples"]] for r in rows_data]
    _emit(args, payload, ["x", "doomed_frac", "samples"], rows)
    return 0


def cmd_blocks(args) -> int:
    out = []
    rows = []
    for i in range(args.samples):
        bs = sample_blocks(_parse_prob(args.p), args.count, Stream(args.seed, i))
        out.append({
            "stream": i,
            "blocks": bs.blocks,
            "taus": bs.taus,
            "partial": bs.partial.serialize(),
        })
        for j, (a, t) in enumerate(zip(bs.blocks, bs.taus)):
            rows.append([i, j, a, t])
    cfg = _config(args, command="blocks", p=args.p, count=args.count, samples=args.samples)
    payload = {"config": cfg.to_dict(), "paths": out}
    _emit(args, payload, ["stream", "i", "block", "tau"], rows)
    return 0


def cmd_verify(args) -> int:
    p = _parse_prob(args.p)
    closed = verify_closed_form(parse_dyadic(args.x), p, args.steps, args.samples, args.seed)
    blocks = verify_block_sums(p, 12, args.samples, args.seed + 1)
    chain = verify_z_chain(p, 2, args.zchain_j, min(args.samples, 200), args.seed + 2)
    cfg = _config(args, command="verify", x=args.x, p=args.p, steps=args.steps, samples=args.samples)
    payload = {
        "config": cfg.to_dict(),
        "closed_form": closed,
        "block_sums": blocks,
        "digit_chain": chain,
        "ok": True,
    }
    rows = [
        ["closed_form", closed["paths"], closed["steps_checked"]],
        ["block_sums", blocks["paths"], blocks["checked"]],
        ["digit_chain", chain["paths"], chain["resolved"]],
    ]
    _emit(args, payload, ["check", "paths", "checked"], rows)
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (streams derive from it)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=1)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact",
                      help="rational arithmetic (default)")
    mode.add_argument("--fast", dest="mode", action="store_const", const="fast",
                      help="double precision engines")
    common.set_defaults(mode="exact")
    common.add_argument("--cache-dir", help="step-function cache dir (or env RUINLAB_CACHE_DIR)")

    ap = argparse.ArgumentParser(prog="ruinlab",
                                 description="ruin probability laboratory for the doubling/halving gamble")
    ap.add_argument("--version", action="version", version=f"ruinlab {__version__} ({KERNEL_IMPL} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grid", parents=[common], help="step function f_n(., p)")
    g.add_argument("--p", required=True, help="win probability (rational like 3/10, or decimal)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--budget", type=int, default=1 << 24, help="breakpoint budget")
    g.set_defaults(func=cmd_grid)

    g = sub.add_parser("poly", parents=[common], help="f_n(x, .) as a polynomial in p")
    g.add_argument("--x", required=True, help="dyadic starting fortune (like 3, 9/4, 2.25)")
    g.add_argument("--n", type=int, required=True)
    g.set_defaults(func=cmd_poly)

    g = sub.add_parser("mc", parents=[common], help="Monte Carlo f_n(x, p)")
    g.add_argument("--x", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--samples", type=int, default=10000)
    g.set_defaults(func=cmd_mc)

    g = sub.add_parser("eventual", parents=[common], help="doom/ruin/censoring by a horizon")
    g.add_argument("--x", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--horizon", type=int, default=500)
    g.add_argument("--samples", type=int, default=10000)
    g.set_defaults(func=cmd_eventual)

    g = sub.add_parser("holder", parents=[common], help="edge exponent of 1 - f at x -> 2+")
    g.add_argument("--p", required=True)
    g.add_argument("--k-lo", type=int, default=4)
    g.add_argument("--k-hi", type=int, default=10)
    g.add_argument("--n", type=int, default=None)
    g.set_defaults(func=cmd_holder)

    g = sub.add_parser("digits", parents=[common], help="leading-digit histogram of the limit sum")
    g.add_argument("--p", required=True)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--samples", type=int, default=10000, help="resolved draws to collect")
    g.add_argument("--guard-bits", type=int, default=32)
    g.set_defaults(func=cmd_digits)

    g = sub.add_parser("couple", parents=[common], help="monotone coupling of two win probabilities")
    g.add_argument("--x", required=True)
    g.add_argument("--p1", required=True)
    g.add_argument("--p2", required=True)
    g.add_argument("--horizon", type=int, default=100)
    g.add_argument("--samples", type=int, default=10000)
    g.set_defaults(func=cmd_couple)

    g = sub.add_parser("scan", parents=[common], help="doom fraction vs fortune for a rho rule")
    g.add_argument("--rho", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--x-lo", required=True)
    g.add_argument("--x-hi", required=True)
    g.add_argument("--x-step", default="1/10")
    g.add_argument("--horizon", type=int, default=300)
    g.add_argument("--samples", type=int, default=10000)
    g.set_defaults(func=cmd_scan)

    g = sub.add_parser("blocks", parents=[common], help="block decompositions of sampled paths")
    g.add_argument("--p", required=True)
    g.add_argument("--count", type=int, default=8)
    g.add_argument("--samples", type=int, default=4)
    g.set_defaults(func=cmd_blocks)

    g = sub.add_parser("verify", parents=[common], help="exact path/block/digit invariants")
    g.add_argument("--x", default="3")
    g.add_argument("--p", default="3/10")
    g.add_argument("--steps", type=int, default=100)
    g.add_argument("--samples", type=int, default=1000)
    g.add_argument("--zchain-j", type=int, default=20)
    g.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except BudgetError as e:
        print(f"ruinlab: budget exhausted: {e}", file=sys.stderr)
        return 3
    except RuinLabError as e:
        print(f"ruinlab: {e}", file=sys.stderr)
        return 4
    except (ValueError, ZeroDivisionError) as e:
        print(f"ruinlab: bad arguments: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
