"""Exact rational scalars and their text encoding.

All symbolic values in this package are stdlib ``fractions.Fraction``
instances: numerator/denominator in lowest terms, positive denominator,
exact arithmetic and comparison.  This module only adds the strict text
codec used by spec files and reports.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["Rational", "parse_rational", "format_rational"]

Rational = Fraction


def parse_rational(value) -> Fraction:
    """Parse an exact rational from an int or a ``"p/q"`` / ``"p"`` string.

    Floats are rejected: a decimal literal has already lost exactness by
    the time it reaches us.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(
        f"not a rational: {value!r} (use an integer or a 'p/q' string)"
    )


def format_rational(value: Fraction) -> str:
    """Canonical text form: ``p/q`` in lowest terms, or plain ``p`` when q == 1."""
    return str(Fraction(value))
