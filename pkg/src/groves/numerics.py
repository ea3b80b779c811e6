"""Exact rational arithmetic and order-statistic helpers.

Every payment, type value, and coefficient in this package is a
:class:`fractions.Fraction`: arbitrary-precision integers, always kept in
canonical reduced form (positive denominator, gcd 1), so equality is
structural and no comparison ever needs a tolerance.  Values are immutable
and safe to share across threads.

Descending-sorted tuples of rationals double as the canonical "ordered
other-agent types" keys used throughout; :func:`sort_desc` builds them.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ContractViolation

Rational = Fraction

RationalLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def rational(value: RationalLike) -> Fraction:
    """Coerce an int, "p/q" string, or Fraction to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise ContractViolation(f"cannot interpret {value!r} as a rational")


def parse_rational(text: str) -> Fraction:
    """Parse the wire form "p/q" (or "p" for integers)."""
    match = _RATIONAL_RE.match(text.strip())
    if match is None:
        raise ContractViolation(f"not a rational literal: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ContractViolation(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    """Render as "p/q", or "p" when the denominator is 1."""
    return str(Fraction(value))


def sort_desc(values: Iterable[Fraction]) -> tuple:
    """Return the values as a descending-sorted tuple (j-th entry = j-th highest)."""
    return tuple(sorted(values, reverse=True))


def order_statistic(profile: Sequence[Fraction], j: int) -> Fraction:
    """The j-th largest element of `profile`, counting multiplicity (j is 1-based)."""
    if not 1 <= j <= len(profile):
        raise ContractViolation(
            f"order statistic index {j} out of range for {len(profile)} values"
        )
    return sorted(profile, reverse=True)[j - 1]


def binomial(n: int, k: int) -> int:
    """C(n, k) as an exact integer; 0 when k > n."""
    if n < 0 or k < 0:
        raise ContractViolation(f"binomial arguments must be nonnegative, got ({n}, {k})")
    return math.comb(n, k)
