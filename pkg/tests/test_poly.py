"""Ruin probability as an exact polynomial in p."""

from fractions import Fraction

import pytest

from ruinlab import poly_eval, poly_fn, pointwise_fn


def test_hand_coefficients():
    # f_3(3, p) = p + p^2 - p^3
    assert poly_fn(3, 3) == [0, 1, 1, -1]
    assert poly_fn(3, 1) == [0, 1]
    assert poly_fn(2, 5) == [1]
    assert poly_fn("9/4", 0) == [0]


def test_eval_matches_pointwise():
    for x in (3, "9/4", 4, "7/2"):
        coeffs = poly_fn(x, 8)
        for i in range(0, 11):
            p = Fraction(i, 10)
            assert poly_eval(coeffs, p) == pointwise_fn(x, p, 8)


def test_eval_endpoints():
    coeffs = poly_fn(3, 12)
    assert poly_eval(coeffs, Fraction(0)) == 0
    assert poly_eval(coeffs, Fraction(1)) == 1


def test_trailing_zeros_trimmed():
    coeffs = poly_fn(3, 6)
    assert coeffs[-1] != 0


def test_float_eval():
    coeffs = poly_fn(3, 3)
    assert abs(poly_eval(coeffs, 0.3) - 0.363) < 1e-15
