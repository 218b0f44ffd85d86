"""Exact rational arithmetic backend.

Everything in this package computes over the rationals (or cyclotomic
extensions with rational coefficients).  gmpy2's mpq is used when available
since it is substantially faster than fractions.Fraction; the two are
interchangeable for our purposes (same hashing, same comparison semantics,
same str() output "p/q" or "n").
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ

Q0 = QQ(0)
Q1 = QQ(1)


def qq(value) -> "QQ":
    """Coerce ints, strings like '3/4', or rationals to the backend type."""
    if isinstance(value, str):
        if "/" in value:
            num, den = value.split("/")
            return QQ(int(num), int(den))
        return QQ(int(value))
    return QQ(value)


def q_str(value) -> str:
    """Canonical decimal-free rendering, 'p/q' or 'n'."""
    return str(value)


def is_integral(value) -> bool:
    return value.denominator == 1


def as_int(value) -> int:
    if value.denominator != 1:
        raise ValueError(f"not an integer: {value}")
    return int(value.numerator)
