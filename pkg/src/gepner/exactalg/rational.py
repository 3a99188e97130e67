"""Exact rationals.

All coefficients in the package are ``gmpy2.mpq`` values; the helpers here
convert from user input and to the ``num``/``den`` string pairs used by the
JSON forms.
"""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq

QQ = mpq
ZERO = mpq(0)
ONE = mpq(1)


def qq(value) -> mpq:
    """Coerce ``int``, ``Fraction``, ``mpq`` or a string like ``"-3/4"``."""
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not accepted")
    return mpq(value)


def to_pair(value) -> tuple[str, str]:
    value = mpq(value)
    return str(value.numerator), str(value.denominator)


def from_pair(num, den) -> mpq:
    return mpq(int(num), int(den))


def to_text(value) -> str:
    value = mpq(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
