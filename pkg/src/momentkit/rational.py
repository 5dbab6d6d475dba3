"""Scalar helpers: exact rationals, float policy and formatting.

A scalar is either an exact :class:`fractions.Fraction` (normalized by
construction: reduced, positive denominator) or a ``float``.  Conversions
from exact to float are always explicit; mixed inputs demote a computation
to the approximate path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

from .errors import ParseError

Scalar = Union[Fraction, float]

# floats whose binary expansion is this short are treated as exact dyadics
_DYADIC_DEN_LIMIT = 2**24


def parse_scalar(value) -> Scalar:
    """Parse a scalar from JSON/CSV input.

    Strings ("3/4", "-2", "0.25") parse exactly as rationals.  Integers are
    exact.  Floats stay floating unless they are short dyadics (0.5, -0.25)
    that round-trip exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return rationalize(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot parse scalar {value!r}: {exc}") from None
    raise ParseError(f"cannot parse scalar of type {type(value).__name__}")


def rationalize(x: float) -> Scalar:
    """Promote a float to Fraction when it is exactly a short dyadic."""
    if not math.isfinite(x):
        raise ParseError(f"non-finite scalar {x!r}")
    frac = Fraction(x)
    if frac.denominator <= _DYADIC_DEN_LIMIT and abs(frac.numerator) < 2**53:
        return frac
    return x


def format_scalar(x: Scalar) -> Union[str, float]:
    """JSON-friendly form: rationals as "p/q" strings, floats unchanged."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return float(x)


def format_complex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "+" if im >= 0 or math.isnan(im) else "-"
    return f"{re!r}{sign}{abs(im)!r}i"


def parse_complex(text: str) -> complex:
    """Parse "a+bi" / "a-bi" / "bi" / "a" complex literals."""
    cleaned = text.strip().replace(" ", "")
    if not cleaned:
        raise ParseError("empty complex literal")
    normalized = cleaned.replace("i", "j")
    try:
        return complex(normalized)
    except ValueError:
        raise ParseError(f"cannot parse complex literal {text!r}") from None


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def all_exact(values: Iterable[Scalar]) -> bool:
    return all(is_exact(v) for v in values)


def to_float(x: Scalar) -> float:
    return float(x)


def integer_nth_root(n: int, k: int):
    """Exact k-th root of a nonnegative integer, or None."""
    if n < 0:
        raise ValueError("negative radicand")
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    # float seed can be off for huge n; fall back to integer bisection
    lo, hi = 0, 1 << ((n.bit_length() // k) + 2)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid**k
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def fraction_nth_root(x: Fraction, k: int):
    """Exact real k-th root of a rational, or None when irrational.

    Even k requires x >= 0; odd k of a negative value is the negative root.
    """
    if k <= 0:
        raise ValueError("root order must be positive")
    if x < 0:
        if k % 2 == 0:
            raise ValueError("even root of a negative rational")
        inner = fraction_nth_root(-x, k)
        return None if inner is None else -inner
    num = integer_nth_root(x.numerator, k)
    if num is None:
        return None
    den = integer_nth_root(x.denominator, k)
    if den is None:
        return None
    return Fraction(num, den)
