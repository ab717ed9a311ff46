"""Quantitative studies of the ruin probability f(x, p).

Everything here composes the exact engines (stepfn, recursion, poly),
the certified deep evaluator (deepfield), and the samplers (sim) into
the standard reports: plateau detection in n, the Holder exponent at
the left edge x -> 2+, the geometric sandwich bounds, leading-digit
statistics of the limit sum, monotonicity in p, and convergence rates.

Estimates at horizons beyond the exact engines' comfort zone (n > 32)
come from the hybrid evaluator with certified error, so every reported
value carries an explicit accuracy statement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .backend import kernels
from .config import RunConfig
from .deepfield import FORWARD_STEPS, EnvelopeGrid, hybrid_eval
from .dyadic import DyadicRational
from .errors import DegenerateSlope, NonConvergent
from .poly import poly_eval, poly_fn
from .recursion import MemoTable, fit_tail_ratio, gap_sequence, pointwise_fn
from .sim import TAIL_MARGIN, digit_from_blocks
from .stepfn import parse_x, _refine

POINTWISE_MAX_N = 32
PLATEAU_N_FLOOR = 16
PLATEAU_N_CAP = 1 << 14


def _default_invh(p: float) -> int:
    # envelope width scales with the profile's slope; p close to 1/2
    # needs the finer grid (see the residual figures in the benchmarks)
    return 160000 if p > 0.325 else 20000


@dataclass(frozen=True)
class PlateauEstimate:
    """Estimate of f(x, p) by doubling the horizon until it stops moving.

    value approximates f_{n_used}(x, p) with |value - f_{n_used}| <= err
    (err = 0 in spirit for the exact/pointwise regime, certified for the
    deep regime); gap is the last doubling increment |f_n - f_{n/2}|,
    which passed the declared tolerance.
    """

    value: float
    n_used: int
    gap: float
    tolerance: float
    err: float = 0.0


class _FieldCache:
    """One envelope grid per (p, invh), stepped monotonically upward."""

    def __init__(self):
        self._fields = {}

    def at_depth(self, p: float, depth: int, invh: int) -> EnvelopeGrid:
        key = (p, invh)
        field = self._fields.get(key)
        if field is None:
            field = EnvelopeGrid(p, invh)
            self._fields[key] = field
        if field.n < depth:
            field.step(depth - field.n)
        elif field.n > depth:
            raise ValueError("field already past requested depth")
        return field


def _estimate_at(x_f: float, p: float, n: int, memo: MemoTable, fields: _FieldCache, invh: int):
    """(value, certified err) for f_n(x, p)."""
    if x_f <= 2.0:
        return 1.0, 0.0
    if n <= POINTWISE_MAX_N:
        return pointwise_fn(DyadicRational.from_fraction(Fraction(x_f)), p, n, "fast", memo), 0.0
    field = fields.at_depth(p, n - FORWARD_STEPS, invh)
    h = hybrid_eval(x_f, p, field)
    return h.value, h.err


def plateau_many(
    xs,
    p: float,
    tol: float,
    n_floor: int = PLATEAU_N_FLOOR,
    n_cap: int = PLATEAU_N_CAP,
    invh: int | None = None,
    _memo: MemoTable | None = None,
    _fields: "_FieldCache | None" = None,
) -> list:
    """Plateau estimates for many x at one p, sharing engine state.

    The horizon doubles n_floor, 2 n_floor, ... and every x stops at the
    first n with |f_n - f_{n/2}| < tol. n_floor exists because early
    increments can be exactly zero (the approximants move in bursts);
    starting the comparison at 16 steps past the trivial region avoids
    declaring a plateau on such a degenerate pause.

    _memo and _fields let residual_report keep the stepped engines for
    follow-up evaluations; there is no reason to pass them otherwise.

    Raises NonConvergent if any x is still moving at n_cap (expected for
    p near 1/2, where f jumps to 1).
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("need 0 <= p < 1")
    xs_f = [float(parse_x(x).as_fraction()) for x in xs]
    if invh is None:
        invh = _default_invh(p)
    out: dict[int, PlateauEstimate] = {}
    pending = []
    for i, x_f in enumerate(xs_f):
        if x_f <= 2.0:
            out[i] = PlateauEstimate(1.0, 0, 0.0, tol)
        elif p == 0.0:
            out[i] = PlateauEstimate(0.0, 0, 0.0, tol)
        else:
            pending.append(i)
    memo = _memo if _memo is not None else MemoTable()
    fields = _fields if _fields is not None else _FieldCache()
    prev: dict[int, tuple] = {}
    n = n_floor
    while pending:
        if n > n_cap:
            stuck = [xs_f[i] for i in pending]
            raise NonConvergent(f"no plateau by n={n_cap} at p={p} for x={stuck}")
        still = []
        for i in pending:
            v, err = _estimate_at(xs_f[i], p, n, memo, fields, invh)
            if i in prev:
                pv, _ = prev[i]
                gap = abs(v - pv)
                if gap < tol:
                    out[i] = PlateauEstimate(v, n, gap, tol, err)
                else:
                    still.append(i)
            else:
                still.append(i)
            prev[i] = (v, err)
        pending = still
        n *= 2
    return [out[i] for i in range(len(xs_f))]


def plateau_estimate_f(x, p: float, tol: float, **kw) -> PlateauEstimate:
    """Single-point convenience wrapper around plateau_many."""
    return plateau_many([x], p, tol, **kw)[0]


def residual_report(xs, ps, tol: float = 1e-6, invh: int | None = None, config: RunConfig | None = None) -> dict:
    """Plateau the grid and measure how well the values satisfy the
    fixed-point relation f(x) = p f((x+1)/2) + (1-p) f(2x-2).

    The residual is the end-to-end accuracy check: it sees plateau bias,
    certified envelope error, and any bookkeeping mistake at once. Each
    triple is evaluated at one common horizon (the deepest plateau
    reached for that p): the relation ties f_{n+1}(x) to f_n of the two
    images, so mixing per-point stopping depths would charge the
    residual with genuine convergence gaps instead of engine error.
    """
    rows = []
    for p in ps:
        p_f = float(p)
        invh_p = invh if invh is not None else _default_invh(p_f)
        pts = []
        for x in xs:
            x_f = float(parse_x(x).as_fraction())
            pts.extend([x_f, (x_f + 1.0) / 2.0, 2.0 * x_f - 2.0])
        memo = MemoTable()
        fields = _FieldCache()
        ests = plateau_many(pts, p_f, tol, invh=invh_p, _memo=memo, _fields=fields)
        n_common = max(e.n_used for e in ests)
        if n_common > 0 and p_f > 0.0:
            common = [_estimate_at(x_f, p_f, n_common, memo, fields, invh_p)[0] for x_f in pts]
        else:
            common = [e.value for e in ests]
        for j, x in enumerate(xs):
            e = ests[3 * j]
            v, vw, vl = common[3 * j], common[3 * j + 1], common[3 * j + 2]
            resid = abs(v - p_f * vw - (1.0 - p_f) * vl)
            rows.append(
                {
                    "x": float(parse_x(x).as_fraction()),
                    "p": p_f,
                    "value": e.value,
                    "n_used": e.n_used,
                    "n_common": n_common,
                    "gap": e.gap,
                    "err": e.err,
                    "residual": resid,
                }
            )
    report = {"tolerance": tol, "rows": rows, "max_residual": max(r["residual"] for r in rows)}
    if config is not None:
        report["config"] = config.to_dict()
    return report


# -- Holder exponent at the left edge --------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    """Slopes s_k = -log2(1 - f_hat(2 + 2^-k, p)) / k and the raw
    estimate: the slope at the largest k (no fitting; the k-dependence
    is a known 1/k bias, so the deepest point is the estimator)."""

    p: float
    slopes: list  # (k, s_k) pairs, k ascending
    exponent: float
    k_used: int
    n_used: int


def holder_exponent(p: float, k_lo: int, k_hi: int, n: int | None = None) -> ExponentFit:
    """Local scaling exponent of 1 - f at x -> 2+ from horizon-n values.

    Requires 0 < p < 1/2 (elsewhere 1 - f vanishes and the log
    degenerates; raises DegenerateSlope)."""
    if not 0 < k_lo <= k_hi:
        raise ValueError("need 0 < k_lo <= k_hi")
    if n is None:
        n = k_hi + 16
    if not 0.0 < p < 0.5:
        raise DegenerateSlope(f"exponent defined for 0 < p < 1/2, got {p}")
    memo = MemoTable()
    slopes = []
    for k in range(k_lo, k_hi + 1):
        x = DyadicRational((1 << (k + 1)) + 1, -k)  # 2 + 2^-k
        v = pointwise_fn(x, p, n, "fast", memo)
        rem = 1.0 - v
        if rem <= 0.0:
            raise DegenerateSlope(f"1 - f_hat vanished at k={k} (p={p}, n={n})")
        slopes.append((k, -math.log2(rem) / k))
    return ExponentFit(p, slopes, slopes[-1][1], k_hi, n)


# -- geometric sandwich ------------------------------------------------------

@dataclass(frozen=True)
class SandwichResult:
    lower: float
    middle: float
    upper: float
    slack: float
    ok: bool


def sandwich_check(p: float, k: int, f_hat_at_3: float, f_hat_near_2: float, slack: float = 0.0) -> SandwichResult:
    """Check (1 - f(3, p)) (1-p)^k <= 1 - f(2 + 2^-k, p) <= (1-p)^(k-1).

    The bounds come from forcing/allowing k initial losses before the
    fortune can leave the edge region. slack absorbs the estimation
    error of the supplied f_hat values.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    q = 1.0 - p
    lower = (1.0 - f_hat_at_3) * q**k
    middle = 1.0 - f_hat_near_2
    upper = q ** (k - 1)
    ok = (lower - slack <= middle) and (middle <= upper + slack)
    return SandwichResult(lower, middle, upper, slack, ok)


# -- digit statistics of the limit sum --------------------------------------

@dataclass(frozen=True)
class DigitHistogram:
    """Empirical distribution of the leading k bits of S = sum A_n 2^-n
    over resolved draws."""

    k: int
    counts: list
    resolved: int
    ambiguous: int
    discarded: int
    tv_uniform: float
    chi2_uniform: float

    @property
    def ambiguity_rate(self) -> float:
        tot = self.resolved + self.ambiguous
        return self.ambiguous / tot if tot else 0.0

    @property
    def zero_frac(self) -> float:
        return self.counts[0] / self.resolved if self.resolved else float("nan")


def digit_report(
    p: float,
    k: int,
    samples: int,
    guard_bits: int = 32,
    seed: int = 0,
    margin: int = TAIL_MARGIN,
    step_cap: int = 1 << 20,
    f_hat_at_3: float | None = None,
    config: RunConfig | None = None,
) -> dict:
    """Histogram of `samples` resolved digit draws, with uniformity
    statistics and, when f_hat_at_3 is given, the structural lower
    bound P(digit = 0) >= (1 - f(3, p)) (1-p)^k
    (k straight losses from 3 force S < 2^-k).
    """
    nblocks = k + guard_bits + 1
    counts = [0] * (1 << k)
    resolved = ambiguous = discarded = 0
    idx = 0
    while resolved < samples:
        blocks, _taus, iend = kernels.sample_blocks(p, nblocks, step_cap, seed, idx, 0)
        idx += 1
        if blocks is None:
            discarded += 1
            continue
        d = digit_from_blocks(blocks, k, margin)
        if d is None:
            ext, _t2, _ = kernels.sample_blocks(p, nblocks, step_cap, seed, idx - 1, iend)
            if ext is not None:
                d = digit_from_blocks(blocks + ext, k, margin)
        if d is None:
            ambiguous += 1
            continue
        counts[d] += 1
        resolved += 1
    m = 1 << k
    expect = resolved / m
    tv = 0.5 * sum(abs(c / resolved - 1.0 / m) for c in counts)
    chi2 = sum((c - expect) ** 2 / expect for c in counts)
    hist = DigitHistogram(k, counts, resolved, ambiguous, discarded, tv, chi2)
    report = {
        "p": p,
        "k": k,
        "histogram": hist,
        "counts": counts,
        "resolved": resolved,
        "ambiguous": ambiguous,
        "discarded": discarded,
        "ambiguity_rate": hist.ambiguity_rate,
        "tv_uniform": tv,
        "chi2_uniform": chi2,
        "zero_frac": hist.zero_frac,
    }
    if f_hat_at_3 is not None:
        bound = (1.0 - f_hat_at_3) * (1.0 - p) ** k
        report["zero_lower_bound"] = bound
        report["zero_bound_ok"] = hist.zero_frac >= bound - 4.0 * math.sqrt(0.25 / resolved)
    if config is not None:
        report["config"] = config.to_dict()
    return report


# -- monotonicity in p --------------------------------------------------------

def monotonicity_report(x, p_grid=None, n: int = 20, config: RunConfig | None = None) -> dict:
    """Exact f_n(x, p) along a p-grid with the strict-increase verdict.

    One polynomial extraction serves the whole grid (f_n(x, .) has
    integer coefficients), so each grid value is exact rational
    arithmetic and the comparisons are decisive.
    """
    if p_grid is None:
        p_grid = [Fraction(i, 20) for i in range(1, 10)]  # 0.05 .. 0.45
    coeffs = poly_fn(x, n)
    rows = []
    prev = None
    strict = True
    for p in p_grid:
        p = Fraction(p)
        v = poly_eval(coeffs, p)
        if prev is not None and not v > prev:
            strict = False
        rows.append({"p": f"{p.numerator}/{p.denominator}", "f_n": v})
        prev = v
    report = {
        "x": str(parse_x(x).as_fraction()),
        "n": n,
        "rows": rows,
        "strictly_increasing": strict,
    }
    if config is not None:
        report["config"] = config.to_dict()
    return report


# -- convergence in n ----------------------------------------------------------

def convergence_report(p, x_lo, x_hi, n_list, mode: str = "fast", config: RunConfig | None = None) -> dict:
    """sup over (x_lo, x_hi] of |f_n - f_2n| for each n in n_list.

    Step functions are built once up to 2 max(n) with snapshots at the
    depths needed, instead of re-iterating per pair.
    """
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list or n_list[0] < 1:
        raise ValueError("n_list must contain positive horizons")
    need = sorted(set(n_list) | set(2 * n for n in n_list))
    if mode == "exact":
        pv = Fraction(p)
        one = Fraction(1)
    else:
        pv = float(p)
        one = 1.0
    snaps = {}
    bps, vals = [(1, 1)], [one]
    depth = 0
    for target in need:
        while depth < target:
            bps, vals = _refine(bps, vals, pv, 1 << 24)
            depth += 1
        snaps[target] = (bps, vals)
    lo = parse_x(x_lo)
    hi = parse_x(x_hi)
    rows = []
    for n in n_list:
        s = _sup_diff_snap(snaps[n], snaps[2 * n], lo.as_tuple(), hi.as_tuple(), mode)
        rows.append({"n": n, "sup_diff": s})
    report = {
        "p": str(p),
        "window": [str(lo.as_fraction()), str(hi.as_fraction())],
        "mode": mode,
        "rows": rows,
    }
    if config is not None:
        report["config"] = config.to_dict()
    return report


def _sup_diff_snap(fa, fb, tlo, thi, mode):
    from .dyadic import _lt, _le
    from .stepfn import _eval_raw

    pts = [thi]
    for bps, _ in (fa, fb):
        for b in bps:
            if _lt(tlo, b) and _le(b, thi):
                pts.append(b)
    best = Fraction(0) if mode == "exact" else 0.0
    for t in pts:
        d = abs(_eval_raw(fa[0], fa[1], t) - _eval_raw(fb[0], fb[1], t))
        if d > best:
            best = d
    return best


def tail_ratio_report(ps, x=3, k_lo: int = 10, k_hi: int = 30, config: RunConfig | None = None) -> dict:
    """Fitted geometric decay ratio of the horizon gaps g_k at x, per p.

    Ratios below 1 certify geometric convergence of f_n(x, p) in the
    fitted window; ratios closer to 1 mean slower convergence.
    """
    rows = []
    for p in ps:
        gaps = gap_sequence(x, float(p), k_hi + 1, mode="fast")
        rows.append(
            {
                "p": float(p),
                "ratio": fit_tail_ratio(gaps, k_lo, k_hi),
                "min_gap": min(float(g) for g in gaps),
            }
        )
    report = {"x": str(parse_x(x).as_fraction()), "k_lo": k_lo, "k_hi": k_hi, "rows": rows}
    if config is not None:
        report["config"] = config.to_dict()
    return report
