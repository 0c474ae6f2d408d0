"""Exact rationals: thin helpers around :class:`fractions.Fraction`."""

from fractions import Fraction
from math import lcm

Rational = Fraction


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"``, ``"num"`` or an int into a canonical Fraction.

    Floats are rejected; they would silently lose exactness.
    """
    if isinstance(text, bool) or isinstance(text, float):
        raise ValueError(f"not an exact rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        if sep:
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational: {text!r}") from None
    return value


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def common_denominator(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out
