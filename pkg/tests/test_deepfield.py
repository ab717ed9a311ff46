"""Certified envelopes and the hybrid deep-horizon evaluator."""

from fractions import Fraction

from ruinlab import EnvelopeGrid, forward_measure, hybrid_eval, pointwise_fn


def test_bracket_contains_exact_small_depths():
    p = Fraction(3, 10)
    field = EnvelopeGrid(0.3, 4000)
    for n in (1, 2, 4, 8, 16):
        field.step(n - field.n)
        for x in (2.25, 3.0, 4.0, 6.0):
            lo, hi = field.bracket(x)
            exact = float(pointwise_fn(Fraction(x), p, n))
            assert lo - 1e-12 <= exact <= hi + 1e-12, (n, x, lo, exact, hi)


def test_bracket_ordering_and_range():
    field = EnvelopeGrid(0.4, 2000)
    field.step(64)
    for x in (2.0 + 2.0**-20, 2.5, 3.0, 10.0, 1e6):
        lo, hi = field.bracket(x)
        assert 0.0 <= lo <= hi <= 1.0


def test_read_boundaries():
    field = EnvelopeGrid(0.3, 1000)
    field.step(8)
    assert field.bracket(2.0) == (1.0, 1.0)
    assert field.bracket(1.5) == (1.0, 1.0)
    lo, hi = field.bracket(2.0 + 2.0 ** field.hi + 1.0)
    assert lo == 0.0 and hi == field.top


def test_forward_measure_conserves_mass():
    absorbed, ts, ws = forward_measure(3.0, 0.3, 20)
    assert ws.min() > 0.0
    total = absorbed + ws.sum()
    assert abs(total - 1.0) < 1e-12
    # absorbed mass after 20 steps from x=3 must match exact f_20(3)
    exact = float(pointwise_fn(3, Fraction(3, 10), 20, mode="fast"))
    assert abs(absorbed - exact) < 1e-12


def test_forward_measure_state_count_stays_bounded():
    # merging keeps the support polynomial-ish, far below 2^28 paths
    absorbed, ts, ws = forward_measure(3.0, 0.3, 28)
    assert len(ts) == len(ws)
    assert len(ts) < 400_000


def test_hybrid_eval_certified():
    # keep the total depth at 32 so the exact reference is computable
    p = Fraction(3, 10)
    field = EnvelopeGrid(0.3, 4000)
    field.step(4)
    hv = hybrid_eval(3.0, 0.3, field)
    assert hv.n == 32
    assert hv.lower <= hv.value <= hv.upper
    assert hv.err >= 0.5 * (hv.upper - hv.lower) - 1e-15
    exact = float(pointwise_fn(3, p, hv.n, mode="fast"))
    assert hv.lower - 1e-12 <= exact <= hv.upper + 1e-12
    assert abs(hv.value - exact) <= hv.err + 1e-12


def test_hybrid_err_shrinks_with_resolution():
    coarse = EnvelopeGrid(0.3, 1000)
    fine = EnvelopeGrid(0.3, 8000)
    coarse.step(36)
    fine.step(36)
    e_coarse = hybrid_eval(3.0, 0.3, coarse).err
    e_fine = hybrid_eval(3.0, 0.3, fine).err
    assert e_fine < e_coarse
