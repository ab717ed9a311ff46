"""Pointwise recursion: agreement with the step engine, memo budget."""

from fractions import Fraction

import pytest

from ruinlab import (
    MemoTable,
    eval_step,
    fit_tail_ratio,
    gap_sequence,
    iterate_step,
    pointwise_fn,
)
from ruinlab.errors import MemoBudgetExceeded

P = Fraction(3, 10)


def test_hand_values():
    assert pointwise_fn(3, P, 1) == P
    assert pointwise_fn(3, P, 2) == P
    assert pointwise_fn(4, P, 2) == P**2
    assert pointwise_fn(3, P, 3) == P + P**2 - P**3
    assert pointwise_fn(2, P, 5) == 1
    assert pointwise_fn("9/4", P, 0) == 0
    assert pointwise_fn("3/2", P, 0) == 1


def test_matches_step_engine():
    for n in (1, 2, 3, 5, 8):
        sf = iterate_step(n, P)
        for x in ("9/4", 3, "7/2", 4, "33/8", 9):
            assert pointwise_fn(x, P, n) == eval_step(sf, x)


def test_memo_reuse():
    memo = MemoTable()
    a = pointwise_fn(3, P, 12, memo=memo)
    size = len(memo.data)
    hits = memo.hits
    b = pointwise_fn(3, P, 12, memo=memo)
    assert a == b
    assert len(memo.data) == size
    assert memo.hits > hits


def test_memo_budget():
    memo = MemoTable(budget=50)
    with pytest.raises(MemoBudgetExceeded):
        pointwise_fn(3, P, 16, memo=memo)


def test_fast_mode_close_to_exact():
    exact = pointwise_fn(3, P, 10)
    fast = pointwise_fn(3, 0.3, 10, mode="fast")
    assert abs(float(exact) - fast) < 1e-12


def test_gap_sequence_hand_values():
    gaps = gap_sequence(3, P, 3, mode="exact")
    # f_1 - f_0 = p, f_2 - f_1 = 0, f_3 - f_2 = p^2 (1 - p)
    assert gaps == [P, Fraction(0), P**2 * (1 - P)]


def test_gaps_nonnegative():
    gaps = gap_sequence(3, 0.3, 20)
    assert all(g >= 0 for g in gaps)


def test_fit_tail_ratio_on_geometric():
    # a synthetic exactly geometric tail must be recovered
    gaps = [0.5**k for k in range(40)]
    r = fit_tail_ratio(gaps, 10, 30)
    assert abs(r - 0.5) < 1e-9
