"""Step-function engine for the ruin recursion.

The n-th approximant f_n(., p) is piecewise constant with finitely many
dyadic breakpoints, so it is represented exactly as ascending
breakpoints b_1 < ... < b_M with half-open pieces: value values[i] on
(b_{i-1}, b_i], values[0] = 1 on (-inf, b_1] with b_1 = 2, and an
implicit 0 beyond b_M. One refinement step pulls breakpoints back
through the inverse maps 2b-1 and (b+2)/2 and mixes the forward images,
which is the whole recursion

    f_{n+1}(x) = p f_n((x+1)/2) + (1-p) f_n(2x - 2).

Two modes share the code path: "exact" keeps Fraction values and is
bit-exact at any depth; "fast" uses doubles (the breakpoints stay exact
dyadics in both). Piece counts grow by about x1.5 per level, so depth
~32 is comfortable within the default budget of 2^24 breakpoints.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .dyadic import (
    DyadicRational,
    _canon,
    _lt,
    _le,
    _map_win,
    _map_lose,
    _premap_win,
    _premap_lose,
    format_rational,
    parse_rational,
)
from .errors import BreakpointBudgetExceeded, InvalidStepFunction

DEFAULT_BUDGET = 1 << 24

_TWO = (1, 1)


def _refine(bps, vals, p, budget):
    """One pullback-refinement step on raw breakpoint/value lists."""
    exact = isinstance(p, Fraction)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    q = one - p

    # preimage breakpoint candidates, both lists ascending (maps monotone)
    A = [_premap_win(*b) for b in bps]
    B = [_premap_lose(*b) for b in bps]
    # merge unique, drop <= 2 (collapsed into leading piece), keep 2 itself as b_1
    merged = [_TWO]
    i = j = 0
    while i < len(A) or j < len(B):
        if j >= len(B) or (i < len(A) and _lt(A[i], B[j])):
            c = A[i]
            i += 1
        elif i >= len(A) and j < len(B):
            c = B[j]
            j += 1
        else:
            if not _lt(B[j], A[i]) and not _lt(A[i], B[j]):
                c = A[i]
                i += 1
                j += 1
            else:
                c = B[j]
                j += 1
        if _le(c, _TWO):
            continue
        if merged and not _lt(merged[-1], c):
            continue
        merged.append(c)

    if len(merged) > budget:
        raise BreakpointBudgetExceeded(
            f"refinement needs {len(merged)} breakpoints, budget is {budget}"
        )

    # evaluate the old function at ascending points with one sweep
    def eval_old_iter(points):
        out = []
        k = 0
        m = len(bps)
        for y in points:
            while k < m and _lt(bps[k], y):
                k += 1
            out.append(vals[k] if k < m else zero)
        return out

    wins = [_map_win(*b) for b in merged[1:]]
    loses = [_map_lose(*b) for b in merged[1:]]
    wv = eval_old_iter(wins)
    lv = eval_old_iter(loses)
    nvals = [one] + [p * a + q * b for a, b in zip(wv, lv)]

    # merge adjacent pieces with equal values (keeps the form canonical)
    obps, ovals = [merged[0]], [nvals[0]]
    for b, v in zip(merged[1:], nvals[1:]):
        if v == ovals[-1]:
            obps[-1] = b
        else:
            obps.append(b)
            ovals.append(v)
    return obps, ovals


def _eval_raw(bps, vals, x):
    """Value at raw dyadic x under (a, b] piece semantics."""
    lo, hi = 0, len(bps)
    while lo < hi:
        mid = (lo + hi) // 2
        if _lt(bps[mid], x):
            lo = mid + 1
        else:
            hi = mid
    if lo < len(bps):
        return vals[lo]
    return Fraction(0) if isinstance(vals[0], Fraction) else 0.0


class StepFunction:
    """One approximant f_n(., p) in canonical piecewise-constant form."""

    __slots__ = ("bps", "vals", "p", "n", "mode")

    def __init__(self, bps, vals, p, n, mode):
        self.bps = bps
        self.vals = vals
        self.p = p
        self.n = n
        self.mode = mode

    def __len__(self):
        return len(self.bps)

    def breakpoints(self):
        return [DyadicRational._raw(b) for b in self.bps]

    def values(self):
        return list(self.vals)

    def __call__(self, x):
        return eval_step(self, x)

    def validate(self):
        """Check canonical-form invariants, raising InvalidStepFunction."""
        if not self.bps or len(self.bps) != len(self.vals):
            raise InvalidStepFunction("breakpoint/value length mismatch")
        if self.bps[0] != _TWO:
            raise InvalidStepFunction(f"first breakpoint must be 2, got {self.bps[0]}")
        one = Fraction(1) if self.mode == "exact" else 1.0
        if self.vals[0] != one:
            raise InvalidStepFunction("leading piece value must be 1")
        top = _canon((1 << self.n) + 1, 0)
        if self.bps[-1] != top:
            raise InvalidStepFunction(
                f"last breakpoint must be 2^{self.n}+1, got {self.bps[-1]}"
            )
        expect = self.p**self.n
        if self.mode == "exact":
            if self.vals[-1] != expect:
                raise InvalidStepFunction("top piece value must be p^n")
        # fast mode builds the top value as a running product, which may
        # differ from pow() by a few ulp
        elif abs(self.vals[-1] - expect) > 1e-13 * abs(expect):
            raise InvalidStepFunction("top piece value must be p^n")
        for a, b in zip(self.bps, self.bps[1:]):
            if not _lt(a, b):
                raise InvalidStepFunction("breakpoints not strictly ascending")
        for u, v in zip(self.vals, self.vals[1:]):
            if v > u:
                raise InvalidStepFunction("values not weakly decreasing")
            if v == u:
                raise InvalidStepFunction("adjacent equal values not merged")
        for m, e in self.bps:
            if m != 0 and m % 2 == 0:
                raise InvalidStepFunction(f"non-canonical mantissa {m}*2^{e}")
        return self

    # -- serialization -------------------------------------------------
    def to_dict(self):
        if self.mode == "exact":
            p_str = format_rational(self.p)
            vals = [format_rational(v) for v in self.vals]
        else:
            p_str = repr(self.p)
            vals = list(self.vals)
        return {
            "p": p_str,
            "n": self.n,
            "breakpoints": [f"{m}*2^{e}" for m, e in self.bps],
            "values": vals,
            "mode": self.mode,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d) -> "StepFunction":
        try:
            mode = d["mode"]
            n = int(d["n"])
            bps = [DyadicRational.parse(s).as_tuple() for s in d["breakpoints"]]
            if mode == "exact":
                p = parse_rational(d["p"])
                vals = [parse_rational(v) for v in d["values"]]
            else:
                p = float(d["p"])
                vals = [float(v) for v in d["values"]]
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidStepFunction(f"malformed step function record: {exc}") from exc
        return cls(bps, vals, p, n, mode)

    @classmethod
    def from_json(cls, s: str) -> "StepFunction":
        try:
            d = json.loads(s)
        except json.JSONDecodeError as exc:
            raise InvalidStepFunction(f"not valid JSON: {exc}") from exc
        return cls.from_dict(d)


def refine_step(sf: StepFunction, budget: int = DEFAULT_BUDGET) -> StepFunction:
    """f_n -> f_{n+1} by pullback refinement."""
    bps, vals = _refine(sf.bps, sf.vals, sf.p, budget)
    return StepFunction(bps, vals, sf.p, sf.n + 1, sf.mode)


def iterate_step(n: int, p, mode: str = "exact", budget: int = DEFAULT_BUDGET) -> StepFunction:
    """Build f_n(., p) from f_0 = indicator of (-inf, 2]."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if mode == "exact":
        p = Fraction(p) if not isinstance(p, Fraction) else p
        one = Fraction(1)
    elif mode == "fast":
        p = float(p)
        one = 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bps, vals = [_TWO], [one]
    for _ in range(n):
        bps, vals = _refine(bps, vals, p, budget)
    return StepFunction(bps, vals, p, n, mode)


def eval_step(sf: StepFunction, x):
    """f_n at a dyadic point (DyadicRational, int, or parseable string)."""
    if isinstance(x, DyadicRational):
        t = x.as_tuple()
    elif isinstance(x, int):
        t = _canon(x, 0)
    elif isinstance(x, tuple):
        t = _canon(*x)
    else:
        t = DyadicRational.from_fraction(Fraction(x)).as_tuple()
    return _eval_raw(sf.bps, sf.vals, t)


def sup_diff(n: int, m: int, p, x_lo, x_hi, mode: str = "exact", budget: int = DEFAULT_BUDGET):
    """sup of |f_n - f_m| over the half-open window (x_lo, x_hi].

    Both functions are piecewise constant with (a, b] pieces, so the sup
    is attained at the window's right edge or at a breakpoint inside it.
    """
    lo = x_lo if isinstance(x_lo, DyadicRational) else parse_x(x_lo)
    hi = x_hi if isinstance(x_hi, DyadicRational) else parse_x(x_hi)
    if not lo < hi:
        raise ValueError("need x_lo < x_hi")
    fn = iterate_step(n, p, mode, budget)
    fm = iterate_step(m, p, mode, budget)
    tlo, thi = lo.as_tuple(), hi.as_tuple()
    pts = [thi]
    for sf in (fn, fm):
        for b in sf.bps:
            if _lt(tlo, b) and _le(b, thi):
                pts.append(b)
    best = Fraction(0) if mode == "exact" else 0.0
    for t in pts:
        d = abs(_eval_raw(fn.bps, fn.vals, t) - _eval_raw(fm.bps, fm.vals, t))
        if d > best:
            best = d
    return best


def parse_x(s) -> DyadicRational:
    """Evaluation points must be dyadic; accept the usual literals."""
    if isinstance(s, DyadicRational):
        return s
    if isinstance(s, int):
        return DyadicRational.from_int(s)
    if isinstance(s, float):
        return DyadicRational.from_fraction(Fraction(s))
    from .dyadic import parse_dyadic

    return parse_dyadic(str(s))
