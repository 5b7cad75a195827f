"""Exact dyadic rationals and the ``m/2^e`` text form."""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .errors import UsageError

_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


def is_dyadic(q: Fraction) -> bool:
    den = q.denominator
    return den & (den - 1) == 0


def format_dyadic(q) -> str:
    """``Fraction(3, 8)`` -> ``'3/2^3'``; zero is ``'0/2^0'``."""
    q = Fraction(q)
    if not is_dyadic(q):
        raise ValueError(f"{q} is not dyadic")
    return f"{q.numerator}/2^{q.denominator.bit_length() - 1}"


def parse_dyadic(text: str) -> Fraction:
    m = _DYADIC_RE.match(text)
    if not m:
        raise UsageError(f"not a dyadic literal (expected m/2^e): {text!r}")
    return Fraction(int(m.group(1)), 1 << int(m.group(2)))


def parse_fraction(text: str) -> Fraction:
    """Decimal, ``p/q`` or ``m/2^e`` literal -> exact Fraction."""
    text = text.strip()
    if "^" in text:
        return parse_dyadic(text)
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (ValueError, ZeroDivisionError, InvalidOperation):
        raise UsageError(f"not a number: {text!r}") from None


def round_to_bits(q: Fraction, bits: int) -> Fraction:
    """Nearest multiple of ``2**-bits`` (ties to even)."""
    return Fraction(round(Fraction(q) * (1 << bits)), 1 << bits)


def to_units(q: Fraction, bits: int) -> Fraction:
    """``q`` measured in units of ``2**-bits`` (exact, possibly fractional)."""
    return Fraction(q) * (1 << bits)


def exceed_threshold(delta: Fraction, bits: int) -> int:
    """Largest integer ``t`` with ``dist > delta  <=>  dist_units > t``."""
    u = to_units(delta, bits)
    return u.numerator // u.denominator


def below_threshold(delta: Fraction, bits: int) -> int:
    """Smallest integer ``t`` with ``dist < delta  <=>  dist_units < t``."""
    u = to_units(delta, bits)
    return -((-u.numerator) // u.denominator)
