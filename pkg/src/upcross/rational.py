"""Exact rational parsing and formatting shared by the file formats and the CLI."""
import re
from fractions import Fraction
from numbers import Rational

from .errors import ParseError

_RATIO = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_rational(text, line=None):
    """Parse ``"p/q"`` or a decimal literal into an exact Fraction.

    Decimal literals are read digit by digit, so ``"0.1"`` is exactly 1/10.
    """
    s = text.strip()
    if _RATIO.match(s):
        num, den = s.split("/")
        if int(den) == 0:
            raise ParseError(f"zero denominator in {s!r}", line)
        return Fraction(int(num), int(den))
    if _DECIMAL.match(s):
        return Fraction(s)
    raise ParseError(f"not a rational literal: {s!r}", line)


def as_rational(value):
    """Coerce ints, Fractions, strings and floats to a Fraction.

    Floats go through their shortest repr, so ``0.4`` becomes 2/5 rather than
    the binary expansion of the double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(q):
    """Serialize as ``"p/q"``, or a bare integer when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
