"""Exact dyadic-rational arithmetic and the recursion maps.

Every quantity the wealth dynamics can produce from integer seeds is a
dyadic rational m*2^e (wealth, bets, normalized fortunes, partial sums,
step-function breakpoints), so the whole exact layer is built on pairs
(mantissa, exponent) with the mantissa odd in canonical form. General
rationals (probabilities, polynomial coefficients) use
fractions.Fraction, re-exported here as BigRational.

The four affine maps that drive everything:

    map_win(x)     = (x+1)/2      forward image after a win
    map_lose(x)    = 2x-2         forward image after a loss
    premap_win(b)  = 2b-1         inverse of map_win
    premap_lose(b) = (b+2)/2      inverse of map_lose

Module-private functions named _* operate on raw (m, e) tuples and are
used by the engines in hot loops; the DyadicRational class is the
public face and holds one canonical tuple.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import ExponentCapExceeded

BigRational = Fraction

_EXPONENT_CAP = 4096


def set_exponent_cap(cap: int) -> int:
    """Set the global |exponent| bound, returning the previous value."""
    global _EXPONENT_CAP
    old = _EXPONENT_CAP
    _EXPONENT_CAP = int(cap)
    return old


def get_exponent_cap() -> int:
    return _EXPONENT_CAP


def _canon(m: int, e: int):
    """Canonical (m, e): m odd, or (0, 0). Enforces the exponent cap."""
    if m == 0:
        return (0, 0)
    s = (m & -m).bit_length() - 1
    if s:
        m >>= s
        e += s
    if e > _EXPONENT_CAP or e < -_EXPONENT_CAP:
        raise ExponentCapExceeded(f"exponent {e} outside +/-{_EXPONENT_CAP}")
    return (m, e)


def _le_int(m: int, e: int, k: int) -> bool:
    """m*2^e <= k for integer k."""
    if e >= 0:
        return (m << e) <= k
    return m <= (k << -e)


def _lt(a, b) -> bool:
    (am, ae), (bm, be) = a, b
    if ae <= be:
        return am < (bm << (be - ae))
    return (am << (ae - be)) < bm


def _le(a, b) -> bool:
    (am, ae), (bm, be) = a, b
    if ae <= be:
        return am <= (bm << (be - ae))
    return (am << (ae - be)) <= bm


def _add(a, b):
    (am, ae), (bm, be) = a, b
    if ae <= be:
        return _canon(am + (bm << (be - ae)), ae)
    return _canon((am << (ae - be)) + bm, be)


def _map_win(m: int, e: int):
    """(x+1)/2 on raw (m, e)."""
    if e >= 0:
        return _canon((m << e) + 1, -1)
    return _canon(m + (1 << -e), e - 1)


def _map_lose(m: int, e: int):
    """2x-2 on raw (m, e)."""
    if e + 1 >= 0:
        return _canon((m << (e + 1)) - 2, 0)
    return _canon(m - (2 << -(e + 1)), e + 1)


def _premap_win(m: int, e: int):
    """2b-1 on raw (m, e)."""
    if e + 1 >= 0:
        return _canon((m << (e + 1)) - 1, 0)
    return _canon(m - (1 << -(e + 1)), e + 1)


def _premap_lose(m: int, e: int):
    """(b+2)/2 on raw (m, e)."""
    if e >= 0:
        return _canon((m << e) + 2, -1)
    return _canon(m + (2 << -e), e - 1)


def _to_float(m: int, e: int) -> float:
    if m == 0:
        return 0.0
    try:
        if e >= 0:
            return float(m << e)
        return m / (1 << -e)
    except OverflowError:
        return math.inf if m > 0 else -math.inf


class DyadicRational:
    """Immutable exact dyadic rational m * 2^e.

    Construction canonicalizes, so two equal values always compare and
    hash identically. Arithmetic is closed (+, -, *, halve, double);
    division is deliberately absent except by powers of two.
    """

    __slots__ = ("m", "e")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        m, e = _canon(int(mantissa), int(exponent))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "e", e)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_int(cls, n: int) -> "DyadicRational":
        return cls(n, 0)

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "DyadicRational":
        fr = Fraction(fr)
        d = fr.denominator
        if d & (d - 1):
            raise ValueError(f"{fr} is not dyadic (denominator not a power of two)")
        return cls(fr.numerator, -(d.bit_length() - 1))

    @classmethod
    def _raw(cls, t) -> "DyadicRational":
        # t already canonical; skip re-canonicalization
        self = cls.__new__(cls)
        object.__setattr__(self, "m", t[0])
        object.__setattr__(self, "e", t[1])
        return self

    # -- views ---------------------------------------------------------
    def as_tuple(self):
        return (self.m, self.e)

    def as_fraction(self) -> Fraction:
        if self.e >= 0:
            return Fraction(self.m << self.e)
        return Fraction(self.m, 1 << -self.e)

    def __float__(self) -> float:
        return _to_float(self.m, self.e)

    def to_decimal(self, max_frac_digits: int = 17) -> str:
        """Exact decimal string (dyadics always terminate), truncated to
        max_frac_digits after the point with a trailing '...' marker."""
        m, e = self.m, self.e
        sign = "-" if m < 0 else ""
        m = abs(m)
        if e >= 0:
            return sign + str(m << e)
        k = -e
        digits = str(m * 5**k).rjust(k + 1, "0")
        whole, frac = digits[:-k], digits[-k:]
        frac = frac.rstrip("0")
        if not frac:
            return sign + whole
        if len(frac) > max_frac_digits:
            return sign + whole + "." + frac[:max_frac_digits] + "..."
        return sign + whole + "." + frac

    # -- serialization ---------------------------------------------------
    def serialize(self) -> str:
        return f"{self.m}*2^{self.e}"

    @classmethod
    def parse(cls, s: str) -> "DyadicRational":
        m_str, sep, e_str = s.partition("*2^")
        if not sep:
            raise ValueError(f"not a dyadic literal: {s!r}")
        return cls(int(m_str), int(e_str))

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return DyadicRational._raw(_add(self.as_tuple(), other.as_tuple()))

    def __sub__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return DyadicRational._raw(_add(self.as_tuple(), (-other.m, other.e)))

    def __neg__(self):
        return DyadicRational._raw((-self.m, self.e))

    def __mul__(self, other):
        if isinstance(other, DyadicRational):
            return DyadicRational(self.m * other.m, self.e + other.e)
        if isinstance(other, int):
            return DyadicRational(self.m * other, self.e)
        return NotImplemented

    __rmul__ = __mul__

    def halve(self) -> "DyadicRational":
        if self.m == 0:
            return self
        return DyadicRational(self.m, self.e - 1)

    def double(self) -> "DyadicRational":
        if self.m == 0:
            return self
        return DyadicRational(self.m, self.e + 1)

    # -- order -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return self.m == other.m and self.e == other.e
        if isinstance(other, int):
            # canonical integers carry e >= 0 (e.g. 2 is (1, 1))
            return self.e >= 0 and (self.m << self.e) == other
        return NotImplemented

    def __hash__(self):
        return hash(self.as_fraction())

    def __lt__(self, other):
        return _lt(self.as_tuple(), self._coerce(other))

    def __le__(self, other):
        return _le(self.as_tuple(), self._coerce(other))

    def __gt__(self, other):
        return _lt(self._coerce(other), self.as_tuple())

    def __ge__(self, other):
        return _le(self._coerce(other), self.as_tuple())

    @staticmethod
    def _coerce(other):
        if isinstance(other, DyadicRational):
            return other.as_tuple()
        if isinstance(other, int):
            return (other, 0)
        raise TypeError(f"cannot compare DyadicRational with {type(other)!r}")

    def __repr__(self):
        return f"DyadicRational({self.m}, {self.e})"

    def __str__(self):
        return self.serialize()


# -- public operation wrappers over the class ---------------------------

def dy_add(a: DyadicRational, b: DyadicRational) -> DyadicRational:
    return a + b


def map_win(x: DyadicRational) -> DyadicRational:
    return DyadicRational._raw(_map_win(x.m, x.e))


def map_lose(x: DyadicRational) -> DyadicRational:
    return DyadicRational._raw(_map_lose(x.m, x.e))


def premap_win(b: DyadicRational) -> DyadicRational:
    return DyadicRational._raw(_premap_win(b.m, b.e))


def premap_lose(b: DyadicRational) -> DyadicRational:
    return DyadicRational._raw(_premap_lose(b.m, b.e))


def digit_window(x: DyadicRational, j: int, k: int) -> int:
    """The k-bit window floor(2^(j+k) x) mod 2^k of x's binary expansion.

    Exact for every dyadic x since the expansion terminates.
    """
    if k < 1:
        raise ValueError("window width k must be >= 1")
    sh = x.e + j + k
    n = x.m << sh if sh >= 0 else x.m >> -sh
    return n % (1 << k)


# -- parsing helpers for CLI / config ------------------------------------

def parse_dyadic(s: str) -> DyadicRational:
    """Accepts 'm*2^e', integers, terminating decimals, and fractions
    with power-of-two denominators ('9/4')."""
    s = s.strip()
    if "*2^" in s:
        return DyadicRational.parse(s)
    return DyadicRational.from_fraction(Fraction(s))


def parse_rational(s: str) -> Fraction:
    """Accepts 'n/d', integers, and decimal strings, exactly."""
    return Fraction(s.strip())


def format_rational(fr: Fraction) -> str:
    return f"{fr.numerator}/{fr.denominator}"
