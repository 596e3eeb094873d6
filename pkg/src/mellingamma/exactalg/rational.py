"""Rational scalars and their "p/q" string form."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
import re

Rational = Fraction

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class RationalParseError(ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an integer into a Fraction.

    Floats are rejected so nothing inexact enters the pipeline.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"not a rational: {value!r}")
    if isinstance(value, _RationalABC):
        return Fraction(value)
    if not isinstance(value, str):
        raise RationalParseError(f"not a rational: {value!r}")
    m = _RAT_RE.match(value)
    if m is None:
        raise RationalParseError(f"malformed rational {value!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalParseError(f"zero denominator in {value!r}")
    return Fraction(num, den)


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_vector(values) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)


def format_vector(vec) -> list[str]:
    return [format_rational(q) for q in vec]


def floor_split(q) -> tuple[Fraction, int]:
    """Split ``q = a + n`` with ``0 <= a < 1`` and ``n`` an integer."""
    q = Fraction(q)
    n = q.numerator // q.denominator
    return q - n, n
