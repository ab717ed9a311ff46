"""Exact dyadic arithmetic, the four affine maps, and digit windows."""

from fractions import Fraction

import pytest

from ruinlab import (
    DyadicRational,
    digit_window,
    dy_add,
    get_exponent_cap,
    map_lose,
    map_win,
    parse_dyadic,
    parse_rational,
    premap_lose,
    premap_win,
    set_exponent_cap,
)
from ruinlab.dyadic import format_rational
from ruinlab.errors import ExponentCapExceeded


def D(num, den=1):
    return DyadicRational.from_fraction(Fraction(num, den))


def test_canonical_form():
    assert DyadicRational(6, -1).as_tuple() == (3, 0)
    assert DyadicRational(4, 0).as_tuple() == (1, 2)
    assert DyadicRational(0, 17).as_tuple() == (0, 0)
    assert DyadicRational(-12, -3).as_tuple() == (-3, -1)


def test_fraction_round_trip():
    for num, den in [(3, 1), (9, 4), (-7, 8), (0, 1), (2**70 + 1, 2**40)]:
        d = D(num, den)
        assert d.as_fraction() == Fraction(num, den)
    with pytest.raises(ValueError):
        DyadicRational.from_fraction(Fraction(1, 3))


def test_arithmetic():
    assert D(9, 4) + D(3, 8) == D(21, 8)
    assert D(9, 4) - D(3) == D(-3, 4)
    assert -D(9, 4) == D(-9, 4)
    assert D(9, 4) * D(1, 2) == D(9, 8)
    assert D(9, 4) * 4 == D(9)
    assert 3 * D(1, 2) == D(3, 2)
    assert D(9, 4).halve() == D(9, 8)
    assert D(9, 4).double() == D(9, 2)
    assert D(0).halve() == D(0)
    assert dy_add(D(1, 2), D(1, 2)) == D(1)


def test_order_and_hash():
    assert D(2) < D(9, 4) < D(7, 2)
    assert D(9, 4) > 2
    assert D(9, 4) <= D(9, 4)
    assert D(2) == 2
    assert D(9, 4) != 2
    assert hash(D(9, 4)) == hash(Fraction(9, 4))
    with pytest.raises(TypeError):
        D(1) < 1.5


def test_maps_hand_values():
    # win sends x to (x+1)/2, loss to 2x-2
    assert map_win(D(3)) == D(2)
    assert map_lose(D(3)) == D(4)
    assert map_win(D(9, 4)) == D(13, 8)
    assert map_lose(D(9, 4)) == D(5, 2)


def test_premaps_invert_maps():
    for num, den in [(3, 1), (9, 4), (5, 2), (33, 16), (257, 1)]:
        b = D(num, den)
        assert map_win(premap_win(b)) == b
        assert map_lose(premap_lose(b)) == b
    # and the pinned images themselves
    assert premap_win(D(2)) == D(3)
    assert premap_lose(D(4)) == D(3)


def test_digit_window():
    # 7/4 = 1.11 in binary: the two bits after the point are 11
    assert digit_window(D(7, 4), 0, 2) == 3
    # 9/4 = 10.01: window 01
    assert digit_window(D(9, 4), 0, 2) == 1
    # shifting the window one place drops the leading bit: .1 -> 10
    assert digit_window(D(7, 4), 1, 2) == 2
    # terminating expansion: everything past it is zero
    assert digit_window(D(7, 4), 5, 4) == 0
    with pytest.raises(ValueError):
        digit_window(D(3), 0, 0)


def test_serialize_parse_round_trip():
    for num, den in [(3, 1), (-9, 4), (0, 1), (12345, 4096)]:
        d = D(num, den)
        assert DyadicRational.parse(d.serialize()) == d
    assert D(3, 2).serialize() == "3*2^-1"
    with pytest.raises(ValueError):
        DyadicRational.parse("2.25")


def test_to_decimal():
    assert D(9, 4).to_decimal() == "2.25"
    assert D(-9, 4).to_decimal() == "-2.25"
    assert D(3).to_decimal() == "3"
    assert D(1, 2**4).to_decimal() == "0.0625"
    # long expansions get truncated with a marker, never rounded
    s = D(1, 2**60).to_decimal(max_frac_digits=5)
    assert s.startswith("0.00000") and s.endswith("...")


def test_parse_helpers():
    for text in ["9/4", "2.25", "9*2^-2"]:
        assert parse_dyadic(text) == D(9, 4)
    assert parse_dyadic("3") == D(3)
    with pytest.raises(ValueError):
        parse_dyadic("1/3")
    assert parse_rational("3/10") == Fraction(3, 10)
    assert parse_rational("0.3") == Fraction(3, 10)
    assert format_rational(Fraction(3, 10)) == "3/10"


def test_exponent_cap():
    old = set_exponent_cap(64)
    try:
        x = D(3)
        with pytest.raises(ExponentCapExceeded):
            for _ in range(100):
                x = x.halve()
    finally:
        set_exponent_cap(old)
    assert get_exponent_cap() == old


def test_immutable():
    d = D(3)
    with pytest.raises(AttributeError):
        d.m = 5
