"""Exact rational scalars.

Every coordinate, weight, and bound in this package is a
``fractions.Fraction``: always in lowest terms with positive denominator,
so equality of values is equality of representations.  This module only
adds the string conventions used by the JSON formats and the CLI.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["Q", "parse_rational", "format_rational"]

# Alias used throughout the package.
Q = Fraction


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer string, or a decimal string exactly.

    Decimals are exact rationals (``"0.25"`` -> 1/4).  Fractions and ints
    pass through unchanged; floats are rejected to keep the system exact.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational literal")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational literal: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Render in the canonical ``p/q`` form (``p`` when q has denominator 1)."""
    return str(Fraction(q))
