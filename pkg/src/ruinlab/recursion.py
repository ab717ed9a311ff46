"""Pointwise evaluation of the approximants f_n(x, p) by memoized descent.

The recursion

    f_n(x) = p f_{n-1}((x+1)/2) + (1-p) f_{n-1}(2x - 2),
    f_0 = indicator of (-inf, 2]

only ever visits dyadic points reachable from x under the two maps, and
that orbit grows far slower than 2^n (about 1e6 nodes at depth 31 from
x = 3), so a memo keyed (mantissa, exponent, depth) makes single-point
queries cheap where the full step-function would be millions of pieces.

Exact mode carries Fraction all the way; fast mode uses doubles and is
good to ~1e-12 relative error for n up to the mid-20s (the mixing
weights are nonnegative, so no cancellation).
"""
from __future__ import annotations

import math
import sys
from fractions import Fraction

from .dyadic import _map_win, _map_lose, _le_int
from .errors import MemoBudgetExceeded
from .stepfn import parse_x

DEFAULT_MEMO_BUDGET = 1 << 25


class MemoTable:
    """Shared cache for pointwise queries; reusable across n and x."""

    __slots__ = ("data", "budget", "hits")

    def __init__(self, budget: int = DEFAULT_MEMO_BUDGET):
        self.data = {}
        self.budget = budget
        self.hits = 0

    def __len__(self):
        return len(self.data)


def _descend(m, e, p, one, n, memo: MemoTable):
    if _le_int(m, e, 2):
        return one
    if not _le_int(m, e, (1 << n) + 1):
        return one - one
    if n == 0:
        return one - one  # x > 2 here
    key = (m, e, n)
    data = memo.data
    v = data.get(key)
    if v is not None:
        memo.hits += 1
        return v
    wm, we = _map_win(m, e)
    lm, le = _map_lose(m, e)
    v = p * _descend(wm, we, p, one, n - 1, memo) + (one - p) * _descend(
        lm, le, p, one, n - 1, memo
    )
    if len(data) >= memo.budget:
        raise MemoBudgetExceeded(f"memo table exceeds budget {memo.budget}")
    data[key] = v
    return v


def pointwise_fn(x, p, n: int, mode: str = "exact", memo: MemoTable | None = None):
    """f_n(x, p) at a single dyadic x.

    Passing the same MemoTable to repeated calls (same p and mode) reuses
    the orbit already explored.
    """
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
    if memo is None:
        memo = MemoTable()
    need = 4 * n + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)
    t = parse_x(x).as_tuple()
    return _descend(t[0], t[1], p, one, n, memo)


def gap_sequence(x, p, n_max: int, mode: str = "fast", memo: MemoTable | None = None):
    """Increments g_k = f_{k+1}(x, p) - f_k(x, p) for k = 0 .. n_max-1.

    The f_n increase to f, so every gap is nonnegative; their decay rate
    is how fast the finite-horizon picture converges at x.
    """
    if memo is None:
        memo = MemoTable()
    f_prev = pointwise_fn(x, p, 0, mode, memo)
    gaps = []
    for k in range(1, n_max + 1):
        f_k = pointwise_fn(x, p, k, mode, memo)
        gaps.append(f_k - f_prev)
        f_prev = f_k
    return gaps


def fit_tail_ratio(gaps, k_lo: int, k_hi: int) -> float:
    """Geometric decay ratio of the gaps over k_lo..k_hi, by least
    squares on log g_k (zero gaps are skipped)."""
    pts = [(k, float(g)) for k, g in enumerate(gaps) if k_lo <= k <= k_hi and g > 0]
    if len(pts) < 2:
        raise ValueError("not enough positive gaps in the fit window")
    ks = [k for k, _ in pts]
    ys = [math.log(g) for _, g in pts]
    kbar = sum(ks) / len(ks)
    ybar = sum(ys) / len(ys)
    num = sum((k - kbar) * (y - ybar) for k, y in zip(ks, ys))
    den = sum((k - kbar) ** 2 for k in ks)
    return math.exp(num / den)
