"""Exact rational arithmetic helpers.

All game evaluation, LP solving and certificate checking in this package is
done with exact rationals.  gmpy2.mpq is used when available (it is roughly
an order of magnitude faster than fractions.Fraction in the simplex hot
loops); the stdlib Fraction is a drop-in fallback.
"""

from __future__ import annotations

import operator
from math import gcd

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Rat

__all__ = ["Rat", "RatLike", "rat", "parse_rational", "format_rational",
           "lcm_denominators", "scale_to_integers"]

RatLike = object  # int | Rat; kept loose on purpose


def rat(value, den=None):
    """Build an exact rational from an int, a rational or a p/q pair.

    Floats are rejected: every quantity in this package is exact.
    """
    if isinstance(value, float) or isinstance(den, float):
        raise TypeError("floats are not exact; convert explicitly first")
    if den is not None:
        return Rat(operator.index(value) if hasattr(value, "__index__") else value,
                   operator.index(den) if hasattr(den, "__index__") else den)
    if hasattr(value, "__index__"):      # int, numpy integer scalars, ...
        return Rat(operator.index(value))
    return Rat(value)


def parse_rational(text: str) -> Rat:
    """Parse 'p' or 'p/q' into an exact rational. Raises ValueError."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        d = int(den)
        if d == 0:
            raise ValueError(f"rational with zero denominator: {text!r}")
        return Rat(int(num), d)
    return Rat(int(text))


def format_rational(value) -> str:
    """Render a rational as 'p' or 'p/q' (exact, no floats)."""
    value = Rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def lcm_denominators(values) -> int:
    """Least common multiple of the denominators of an iterable of rationals."""
    l = 1
    for v in values:
        d = int(Rat(v).denominator)
        l = l // gcd(l, d) * d
    return l


def scale_to_integers(values):
    """Scale rationals by the lcm of their denominators; returns (ints, scale)."""
    vals = [Rat(v) for v in values]
    scale = lcm_denominators(vals)
    return [int(v * scale) for v in vals], scale
