"""Outward-rounded evaluation of products of rational powers.

Every quantity handled here is a positive real of the form
prod base_i^(e_i) with rational bases and rational exponents.  Values are
enclosed in [lo, hi] with dyadic endpoints carrying ``prec`` bits of
mantissa; fractional powers go through exact integer k-th roots, so the
enclosure is rigorous rather than merely accurate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

DEFAULT_PRECISION = 128
GUARD_BITS = 32


def iroot_floor(x: int, k: int) -> int:
    """floor(x ** (1/k)) for x >= 0, k >= 1."""
    if x < 0:
        raise ValueError("negative radicand")
    return int(gmpy2.iroot(gmpy2.mpz(x), k)[0])


def iroot_ceil(x: int, k: int) -> int:
    if x < 0:
        raise ValueError("negative radicand")
    r, exact = gmpy2.iroot(gmpy2.mpz(x), k)
    return int(r) if exact else int(r) + 1


def round_down(x: Fraction, prec: int) -> Fraction:
    """Largest dyadic with ``prec`` significant bits that is <= x."""
    x = Fraction(x)
    if x == 0:
        return x
    if x < 0:
        return -round_up(-x, prec)
    a, b = x.numerator, x.denominator
    shift = prec - (a.bit_length() - b.bit_length())
    if shift >= 0:
        m = (a << shift) // b
        return Fraction(m, 1 << shift)
    m = a // (b << -shift)
    return Fraction(m << -shift)


def round_up(x: Fraction, prec: int) -> Fraction:
    x = Fraction(x)
    if x == 0:
        return x
    if x < 0:
        return -round_down(-x, prec)
    a, b = x.numerator, x.denominator
    shift = prec - (a.bit_length() - b.bit_length())
    if shift >= 0:
        m = -((-(a << shift)) // b)
        return Fraction(m, 1 << shift)
    m = -((-a) // (b << -shift))
    return Fraction(m << -shift)


def _dyadic_parts(x: Fraction):
    # x = M * 2^E
    a, b = x.numerator, x.denominator
    e = b.bit_length() - 1
    if b != 1 << e:
        raise ValueError("not dyadic")
    return a, -e


def _root_of_dyadic(x: Fraction, p: int, q: int, prec: int, up: bool) -> Fraction:
    """Directed x^(p/q) for dyadic x > 0, p >= 0, q >= 1."""
    M, E = _dyadic_parts(x)
    K = gmpy2.mpz(M) ** p
    Ep = E * p
    s, r = divmod(Ep, q)
    K <<= r
    w = prec + GUARD_BITS
    root = (iroot_ceil if up else iroot_floor)(K << (w * q), q)
    return Fraction(root) * Fraction(2) ** (s - w)


def pow_enclosure(base: Fraction, exp: Fraction, prec: int = DEFAULT_PRECISION):
    """[lo, hi] containing base**exp for base > 0."""
    base = Fraction(base)
    exp = Fraction(exp)
    if base <= 0:
        raise ValueError("powers need a positive base")
    if exp.denominator == 1:
        v = base ** int(exp)
        return round_down(v, prec), round_up(v, prec)
    if exp < 0:
        lo, hi = pow_enclosure(base, -exp, prec + 2)
        return round_down(1 / hi, prec), round_up(1 / lo, prec)
    p, q = exp.numerator, exp.denominator
    w = prec + GUARD_BITS
    lo_b = round_down(base, w)
    hi_b = round_up(base, w)
    lo = _root_of_dyadic(lo_b, p, q, w, up=False)
    hi = _root_of_dyadic(hi_b, p, q, w, up=True)
    return round_down(lo, prec), round_up(hi, prec)


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x) -> Enclosure:
        x = Fraction(x)
        return cls(x, x)

    def mul(self, other: Enclosure, prec: int) -> Enclosure:
        # positive quantities only
        return Enclosure(round_down(self.lo * other.lo, prec), round_up(self.hi * other.hi, prec))

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def width(self) -> Fraction:
        return self.hi - self.lo


def to_decimal(x: Fraction, digits: int = 30, up: bool = False) -> str:
    """Scientific decimal string rounded in the requested direction."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    if x < 0:
        x = -x
        up = not up
    # find exponent e with 10^e <= x < 10^(e+1)
    e = len(str(x.numerator)) - len(str(x.denominator))
    while Fraction(10) ** e > x:
        e -= 1
    while Fraction(10) ** (e + 1) <= x:
        e += 1
    scaled = x / Fraction(10) ** (e - digits + 1)
    m = -((-scaled.numerator) // scaled.denominator) if up else scaled.numerator // scaled.denominator
    if len(str(m)) > digits:  # rounding up carried into a new digit
        m //= 10
        e += 1
    s = str(m)
    return f"{sign}{s[0]}.{s[1:]}e{e:+d}"
