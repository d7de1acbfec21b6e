"""Parsing and formatting of exact rationals as "p/q" strings."""

from fractions import Fraction
import math
import re


_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted where an exact rational is required")
    text = str(text).strip()
    if not _RATIONAL.fullmatch(text):
        raise ValueError(f"expected an integer or p/q, got {text!r}")
    return Fraction(text)


def format_rational(value) -> str:
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def floor_log2(value: Fraction) -> int:
    """Largest integer l with 2**l <= value, for value >= 1."""
    value = Fraction(value)
    if value < 1:
        raise ValueError("floor_log2 needs value >= 1")
    return (value.numerator // value.denominator).bit_length() - 1


def log2_upper(m: int, denom: int = 64) -> Fraction:
    """Smallest k/denom with log2(m) <= k/denom, decided by 2**k >= m**denom.

    The result r satisfies log2(m) <= r < log2(m) + 1/denom and is exact
    when m is a power of two.
    """
    if m < 1:
        raise ValueError("m must be positive")
    target = m ** denom
    lo, hi = 0, denom * m.bit_length()
    while lo < hi:
        mid = (lo + hi) // 2
        if (1 << mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return Fraction(lo, denom)


def pow_lower(base: Fraction, exp: int, bits: int = 256) -> Fraction:
    """Rational lower bound for base**exp with 0 <= base <= 1.

    Exact for small exponents; otherwise square-and-multiply with every
    intermediate rounded down to a multiple of 2**-bits.
    """
    base = Fraction(base)
    if not 0 <= base <= 1:
        raise ValueError("pow_lower needs 0 <= base <= 1")
    if exp <= 4096:
        return base ** exp
    scale = 1 << bits

    def down(q):
        return Fraction((q.numerator * scale) // q.denominator, scale)

    result = Fraction(1)
    b = down(base)
    e = exp
    while e:
        if e & 1:
            result = down(result * b)
        e >>= 1
        if e:
            b = down(b * b)
    return result
