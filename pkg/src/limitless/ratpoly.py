"""Exact polynomials over the rationals, and differentiation by division.

The derivative of ``p`` is obtained without limits: ``p(x) - p(a)`` has the
root ``x = a`` and therefore factors as ``(x - a) q(x, a)``; the derivative is
the diagonal ``q(x, x)``.  Dividing once more gives the tangent remainder
``r(x, a)`` with ``p(x) - p(a) - p'(a)(x - a) = (x - a)^2 r(x, a)``.

Coefficients are :class:`fractions.Fraction` throughout, so every identity
here holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Iterator, Sequence, Union

Rational = Fraction

RationalLike = Union[Fraction, int, str, float]


def to_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Floats convert exactly (their binary value), strings may be ``"3"``,
    ``"-7/4"`` or ``"0.25"``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} has no rational form")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(r: Fraction) -> str:
    """Wire form used in JSON payloads: always ``"num/den"``."""
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    return to_rational(text)


def _coef_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(terms: Iterable[tuple[Fraction, Sequence[tuple[str, int]]]]) -> str:
    """Render ``coef * var^exp * ...`` terms in the order given.

    The output re-parses with :func:`limitless.expr.parse`.
    """
    pieces: list[str] = []
    for coef, monomial in terms:
        if coef == 0:
            continue
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in monomial if e)
        mag = abs(coef)
        if not mono:
            body = _coef_text(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_coef_text(mag)}*{mono}"
        if not pieces:
            pieces.append(body if coef > 0 else f"-{body}")
        else:
            pieces.append(f" + {body}" if coef > 0 else f" - {body}")
    return "".join(pieces) if pieces else "0"


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial; ``coeffs[i]`` is the coefficient of x^i.

    Trailing zeros are stripped on construction, so the zero polynomial is
    the empty tuple and its degree is -1.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [to_rational(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c: RationalLike) -> Polynomial:
        return cls((c,))

    @classmethod
    def monomial(cls, n: int, c: RationalLike = 1) -> Polynomial:
        if n < 0:
            raise ValueError("monomial degree must be non-negative")
        return cls((0,) * n + (c,))

    @classmethod
    def x(cls) -> Polynomial:
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        """Horner evaluation. Works for any ring element, so ``p(g)`` composes."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if isinstance(acc, int):
            acc = Fraction(acc)
        return acc

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return other
        return Polynomial.constant(to_rational(other))

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(tuple(u + v for u, v in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> Polynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Polynomial:
        return self._coerce(other) - self

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            k = to_rational(other)
            return Polynomial(tuple(k * c for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, u in enumerate(self.coeffs):
            if u:
                for j, v in enumerate(other.coeffs):
                    out[i + j] += u * v
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result, base = Polynomial.constant(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def to_text(self, var: str = "x") -> str:
        return format_terms(
            (c, ((var, i),)) for i, c in reversed(list(enumerate(self.coeffs)))
        )

    def __str__(self) -> str:
        return self.to_text()

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> Polynomial:
        return cls(tuple(parse_rational(s) for s in data))


@dataclass(frozen=True)
class BivariatePolynomial:
    """Dense polynomial in (x, a); ``coeffs[i][j]`` multiplies x^i a^j.

    Stored rectangular with trailing all-zero rows and columns trimmed.
    """

    coeffs: tuple[tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        rows = [[to_rational(c) for c in row] for row in self.coeffs]
        width = max((len(r) for r in rows), default=0)
        rows = [r + [Fraction(0)] * (width - len(r)) for r in rows]
        while rows and not any(rows[-1]):
            rows.pop()
        while width and not any(r[width - 1] for r in rows):
            width -= 1
        rows = [r[:width] for r in rows] if width else []
        object.__setattr__(self, "coeffs", tuple(tuple(r) for r in rows))

    @classmethod
    def from_x(cls, p: Polynomial) -> BivariatePolynomial:
        return cls(tuple((c,) for c in p.coeffs))

    @classmethod
    def from_a(cls, p: Polynomial) -> BivariatePolynomial:
        return cls((p.coeffs,)) if p.coeffs else cls()

    @classmethod
    def from_columns(cls, cols: Sequence[Polynomial]) -> BivariatePolynomial:
        """Build from the a-polynomial coefficients of x^0, x^1, ..."""
        return cls(tuple(c.coeffs for c in cols))

    @classmethod
    def x_minus_a(cls) -> BivariatePolynomial:
        return cls(((0, -1), (1,)))

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree_x(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree_a(self) -> int:
        return len(self.coeffs[0]) - 1 if self.coeffs else -1

    def terms(self) -> Iterator[tuple[int, int, Fraction]]:
        for i, row in enumerate(self.coeffs):
            for j, c in enumerate(row):
                if c:
                    yield i, j, c

    def x_columns(self) -> list[Polynomial]:
        """The coefficient of each x^i, as a polynomial in a."""
        return [Polynomial(row) for row in self.coeffs]

    def __call__(self, x, a):
        acc = 0
        for row in reversed(self.coeffs):
            inner = 0
            for c in reversed(row):
                inner = inner * a + c
            acc = acc * x + inner
        if isinstance(acc, int):
            acc = Fraction(acc)
        return acc

    def diagonal(self) -> Polynomial:
        """Substitute a = x."""
        out = [Fraction(0)] * (self.degree_x + self.degree_a + 1 if self.coeffs else 0)
        for i, j, c in self.terms():
            out[i + j] += c
        return Polynomial(tuple(out))

    def swap(self) -> BivariatePolynomial:
        """Exchange the roles of x and a."""
        if not self.coeffs:
            return self
        return BivariatePolynomial(tuple(zip(*self.coeffs)))

    def _coerce(self, other) -> BivariatePolynomial:
        if isinstance(other, BivariatePolynomial):
            return other
        if isinstance(other, Polynomial):
            return BivariatePolynomial.from_x(other)
        return BivariatePolynomial(((to_rational(other),),))

    def __add__(self, other) -> BivariatePolynomial:
        other = self._coerce(other)
        nx = max(len(self.coeffs), len(other.coeffs))
        na = max(self.degree_a, other.degree_a) + 1
        out = [[Fraction(0)] * na for _ in range(nx)]
        for src in (self, other):
            for i, j, c in src.terms():
                out[i][j] += c
        return BivariatePolynomial(tuple(tuple(r) for r in out))

    __radd__ = __add__

    def __neg__(self) -> BivariatePolynomial:
        return BivariatePolynomial(tuple(tuple(-c for c in row) for row in self.coeffs))

    def __sub__(self, other) -> BivariatePolynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> BivariatePolynomial:
        return self._coerce(other) - self

    def __mul__(self, other) -> BivariatePolynomial:
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return BivariatePolynomial()
        nx = self.degree_x + other.degree_x + 1
        na = self.degree_a + other.degree_a + 1
        out = [[Fraction(0)] * na for _ in range(nx)]
        for i, j, c in self.terms():
            for k, m, d in other.terms():
                out[i + k][j + m] += c * d
        return BivariatePolynomial(tuple(tuple(r) for r in out))

    __rmul__ = __mul__

    def to_text(self, xvar: str = "x", avar: str = "a") -> str:
        ordered = sorted(self.terms(), key=lambda t: (-(t[0] + t[1]), -t[0]))
        return format_terms((c, ((xvar, i), (avar, j))) for i, j, c in ordered)

    def __str__(self) -> str:
        return self.to_text()

    def to_json(self) -> list[list[str]]:
        return [[format_rational(c) for c in row] for row in self.coeffs]


def _divide_by_x_minus_a(cols: Sequence[Polynomial]) -> tuple[list[Polynomial], Polynomial]:
    """Synthetic division of sum_k cols[k](a) x^k by (x - a).

    One Horner pass with the symbolic root ``a``; returns the quotient's
    columns and the remainder, which is the dividend evaluated at x = a.
    """
    if not cols:
        return [], Polynomial()
    a = Polynomial.x()  # the variable a, as a polynomial in a
    n = len(cols) - 1
    quotient: list[Polynomial] = [Polynomial()] * n
    acc = cols[n]
    for k in range(n - 1, -1, -1):
        quotient[k] = acc
        acc = cols[k] + a * acc
    return quotient, acc


def divided_difference(p: Polynomial) -> BivariatePolynomial:
    """The q(x, a) with p(x) - p(a) = (x - a) q(x, a)."""
    cols = [Polynomial.constant(c) for c in p.coeffs]
    q, _ = _divide_by_x_minus_a(cols)
    return BivariatePolynomial.from_columns(q)


def derivative(p: Polynomial) -> Polynomial:
    """p' as the diagonal q(x, x) of the divided difference."""
    return divided_difference(p).diagonal()


def tangent_remainder(p: Polynomial) -> BivariatePolynomial:
    """The r(x, a) with p(x) - p(a) - p'(a)(x - a) = (x - a)^2 r(x, a).

    Dividing q(x, a) by (x - a) once more leaves remainder q(a, a) = p'(a),
    so the quotient is exactly r.
    """
    q = divided_difference(p)
    r, _ = _divide_by_x_minus_a(q.x_columns())
    return BivariatePolynomial.from_columns(r)


def eval_poly(p: Polynomial, x: RationalLike) -> Fraction:
    return p(to_rational(x))


def eval2(b: BivariatePolynomial, x: RationalLike, a: RationalLike) -> Fraction:
    return b(to_rational(x), to_rational(a))


def compose(p: Polynomial, g: Polynomial) -> Polynomial:
    """p(g(x))."""
    result = Polynomial()
    for c in reversed(p.coeffs):
        result = result * g + c
    return result


def multiply(p: Polynomial, g: Polynomial) -> Polynomial:
    return p * g


def add(p: Polynomial, g: Polynomial) -> Polynomial:
    return p + g


def scale(p: Polynomial, k: RationalLike) -> Polynomial:
    return p * to_rational(k)
