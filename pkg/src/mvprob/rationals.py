"""Unit-interval rational helpers.

Every scalar and carrier value in the package is an exact
`fractions.Fraction` confined to [0, 1].  Fraction keeps numerator and
denominator coprime, so the canonical form comes for free; these
helpers add parsing, range checks, and bounded random sampling.
"""

from __future__ import annotations

import re
from fractions import Fraction
from random import Random

from .errors import InputError

ZERO = Fraction(0)
ONE = Fraction(1)

# integer or integer/positive-integer, nothing else (no decimals, no spaces)
_RATIONAL_RE = re.compile(r"^-?\d+(?:/[1-9]\d*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` with q > 0."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise InputError(f"not a rational literal: {text!r}")
    return Fraction(text)


def parse_unit(text: str) -> Fraction:
    """Parse a rational literal and require it to lie in [0, 1]."""
    return require_unit(parse_rational(text))


def require_unit(value: Fraction) -> Fraction:
    if not isinstance(value, Fraction):
        raise InputError(f"expected an exact rational, got {type(value).__name__}")
    if value < ZERO or value > ONE:
        raise InputError(f"value {value} outside [0, 1]")
    return value


def format_rational(value: Fraction) -> str:
    """Render as ``p`` or ``p/q``, never as a decimal."""
    return str(value)


def random_unit(rng: Random, max_denominator: int = 60) -> Fraction:
    """Random rational in [0, 1] with denominator at most ``max_denominator``."""
    q = rng.randint(1, max_denominator)
    return Fraction(rng.randint(0, q), q)
