"""Conversions between floats, strings and exact rationals."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

RATIONALIZE_TOL = 1e-12


def rationalize(x, tol: float = RATIONALIZE_TOL) -> Fraction:
    """Shortest continued-fraction convergent within ``tol`` (relative for |x| > 1) of ``x``."""
    if isinstance(x, Rational):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot rationalize {x}")
    exact = Fraction(x)
    target = tol * max(1.0, abs(x))
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    rest = exact
    while True:
        a = math.floor(rest)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        approx = Fraction(h, k)
        if abs(approx - exact) <= target:
            return approx
        frac = rest - a
        if frac == 0:
            return approx
        rest = 1 / frac


def parse_rational(text: str) -> Fraction:
    """Parse ``"3"``, ``"-1/2"``, ``"0.25"`` or ``"1e-2"`` exactly (decimal strings are exact)."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return rationalize(float(text))


def fmt_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def div(a, b):
    """Exact quotient that stays an ``int`` when ``b`` divides ``a``."""
    if type(a) is int and type(b) is int:
        q, r = divmod(a, b)
        return q if r == 0 else Fraction(a, b)
    q = Fraction(a) / b
    return q.numerator if q.denominator == 1 else q
