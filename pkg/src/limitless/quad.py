"""Exact polynomial integration and certified Riemann enclosures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInterval, NegativeL
from .numeric import NumericFunction
from .ratpoly import Polynomial, RationalLike, to_rational

ENCLOSURE_SLACK = 2.0**-38


def antiderivative(p: Polynomial) -> Polynomial:
    """The P with P' = p and P(0) = 0."""
    return Polynomial((Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(p.coeffs)))


def integrate_poly(p: Polynomial, a: RationalLike, b: RationalLike) -> Fraction:
    P = antiderivative(p)
    return P(to_rational(b)) - P(to_rational(a))


def power_sum(n: int, k: int) -> int:
    """1^k + 2^k + ... + n^k, accumulated directly."""
    if n < 0 or k < 0:
        raise ValueError("power_sum needs n >= 0 and k >= 0")
    total = 0
    for i in range(1, n + 1):
        total += i**k
    return total


def riemann_power_curve(n: int, k: int) -> float:
    """Right-endpoint sum (1/n) sum (i/n)^k approximating the area under x^k on [0, 1]."""
    if n < 1 or k < 0:
        raise ValueError("riemann_power_curve needs n >= 1 and k >= 0")
    return float(Fraction(power_sum(n, k), n ** (k + 1)))


@dataclass(frozen=True)
class IntegralEnclosure:
    lower: float
    upper: float
    n_panels: int
    lipschitz_L: float
    midpoint_sum: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "n_panels": self.n_panels,
            "lipschitz_L": self.lipschitz_L,
            "midpoint_sum": self.midpoint_sum,
        }


def riemann_enclosure(f: NumericFunction, L: float, a: float, b: float, n: int) -> IntegralEnclosure:
    """Midpoint sum with the Lipschitz deviation bound.

    On a panel of width h, |f(t) - f(mid)| <= L h / 2, so the integral lies
    within L (b - a) h / 2 of the midpoint sum.  An outward slack of
    2^-38 (|S| + 1) absorbs the floating-point rounding of S.
    """
    a, b, L = float(a), float(b), float(L)
    if not a < b:
        raise InvalidInterval(f"need a < b, got [{a}, {b}]")
    if not L >= 0 or math.isinf(L):
        raise NegativeL(f"Lipschitz constant must be finite and >= 0, got {L}")
    if n < 1:
        raise ValueError("n must be at least 1")
    h = (b - a) / n
    mids = a + (np.arange(1, n + 1, dtype=float) - 0.5) * h
    S = h * math.fsum(f.values(mids))
    half = L * (b - a) * h / 2
    slack = ENCLOSURE_SLACK * (abs(S) + 1.0)
    return IntegralEnclosure(S - half - slack, S + half + slack, n, L, S)
