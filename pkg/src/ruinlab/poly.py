"""f_n(x, .) as a polynomial in the win probability p.

For fixed dyadic x and horizon n the approximant is a polynomial in p
with integer coefficients (each surviving length-n word contributes
p^wins (1-p)^losses). Carrying the coefficient vector instead of a
value gives a third, structurally different engine to cross-check the
step-function and pointwise evaluators, and lets one x be swept over
many p cheaply.
"""
from __future__ import annotations

from fractions import Fraction

from .dyadic import _map_win, _map_lose, _le_int
from .errors import MemoBudgetExceeded
from .recursion import DEFAULT_MEMO_BUDGET
from .stepfn import parse_x

_ONE = (1,)
_ZERO = (0,)


def _mix(win, lose):
    """p*win + (1-p)*lose on coefficient tuples."""
    out = [0] * max(len(win) + 1, len(lose) + 1)
    for i, c in enumerate(win):
        out[i + 1] += c
    for i, c in enumerate(lose):
        out[i] += c
        out[i + 1] -= c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _descend(m, e, n, memo, budget):
    if _le_int(m, e, 2):
        return _ONE
    if not _le_int(m, e, (1 << n) + 1):
        return _ZERO
    if n == 0:
        return _ZERO
    key = (m, e, n)
    v = memo.get(key)
    if v is not None:
        return v
    wm, we = _map_win(m, e)
    lm, le = _map_lose(m, e)
    v = _mix(_descend(wm, we, n - 1, memo, budget), _descend(lm, le, n - 1, memo, budget))
    if len(memo) >= budget:
        raise MemoBudgetExceeded(f"memo table exceeds budget {budget}")
    memo[key] = v
    return v


def poly_fn(x, n: int, memo: dict | None = None, budget: int = DEFAULT_MEMO_BUDGET):
    """Coefficients [c_0, c_1, ...] of f_n(x, p) = sum c_k p^k.

    x <= 2 gives [1] and x beyond 2^n + 1 gives [0] (the cutoffs of the
    horizon-n approximant).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if memo is None:
        memo = {}
    import sys

    need = 4 * n + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)
    t = parse_x(x).as_tuple()
    return list(_descend(t[0], t[1], n, memo, budget))


def poly_eval(coeffs, p):
    """Horner evaluation; exact when p is a Fraction."""
    if isinstance(p, Fraction):
        acc = Fraction(0)
    else:
        acc = 0.0
    for c in reversed(coeffs):
        acc = acc * p + c
    return acc
