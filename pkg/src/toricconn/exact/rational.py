"""Strict conversion between exact rationals and their JSON spellings."""

import re
from fractions import Fraction

from ..errors import ParseError

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Parse a JSON integer or a ``"p/q"`` string.

    Floats, booleans and decimal strings are rejected: a float has already
    lost exactness by the time it reaches us.
    """
    if isinstance(value, bool):
        raise ParseError(f"boolean is not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise ParseError(f"not an exact rational: {value!r}")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ParseError(f"zero denominator: {value!r}")
        return Fraction(int(m.group(1)), den)
    raise ParseError(f"not an exact rational: {value!r}")


def parse_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}")
    return value


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
