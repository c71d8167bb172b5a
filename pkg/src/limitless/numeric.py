"""Black-box real functions evaluated in binary64, plus grid helpers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import EvaluationFailure, MissingDerivative
from .ratpoly import Polynomial, derivative

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NumericFunction:
    """A real function ``f`` with an optional derivative handle ``df``.

    Both handles take and return float64 arrays.  ``polynomial`` is set for
    instances backed by an exact :class:`Polynomial`.
    """

    f: ArrayFn
    df: Optional[ArrayFn] = None
    label: str = "f"
    polynomial: Optional[Polynomial] = None

    def values(self, xs) -> np.ndarray:
        return _checked(self.f, xs, self.label)

    def derivative_values(self, xs) -> np.ndarray:
        if self.df is None:
            raise MissingDerivative(f"{self.label} has no derivative handle")
        return _checked(self.df, xs, f"({self.label})'")

    def __call__(self, x: float) -> float:
        return float(self.values(np.array([x], dtype=float))[0])

    def derivative_at(self, x: float) -> float:
        return float(self.derivative_values(np.array([x], dtype=float))[0])


def _checked(fn: ArrayFn, xs, label: str) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    with np.errstate(all="ignore"):
        out = np.asarray(fn(xs), dtype=float)
    out = np.broadcast_to(out, xs.shape)
    bad = ~np.isfinite(out)
    if bad.any():
        at = xs[bad].flat[0]
        raise EvaluationFailure(f"{label} is undefined or non-finite at x = {at!r}")
    return np.array(out)


def _horner(coeffs: tuple[float, ...]) -> ArrayFn:
    def run(x):
        acc = np.zeros_like(x, dtype=float)
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    return run


def polynomial(p: Polynomial, label: Optional[str] = None) -> NumericFunction:
    dp = derivative(p)
    return NumericFunction(
        f=_horner(tuple(float(c) for c in p.coeffs)),
        df=_horner(tuple(float(c) for c in dp.coeffs)),
        label=label or p.to_text(),
        polynomial=p,
    )


def _nonnegative(x: np.ndarray, name: str) -> None:
    if np.any(x < 0):
        raise EvaluationFailure(f"{name} is only defined for x >= 0 (got {x[x < 0].flat[0]!r})")


def power(gamma) -> NumericFunction:
    """x^gamma on x >= 0."""
    g = float(Fraction(gamma)) if isinstance(gamma, (str, Fraction)) else float(gamma)

    def f(x):
        _nonnegative(x, f"x^{g}")
        return np.power(x, g)

    def df(x):
        _nonnegative(x, f"x^{g}")
        return g * np.power(x, g - 1.0)

    return NumericFunction(f, df, label=f"x^{g:g}")


def sqrt() -> NumericFunction:
    def f(x):
        _nonnegative(x, "sqrt")
        return np.sqrt(x)

    def df(x):
        _nonnegative(x, "sqrt")
        return 0.5 / np.sqrt(x)

    return NumericFunction(f, df, label="sqrt(x)")


def absolute() -> NumericFunction:
    return NumericFunction(np.abs, np.sign, label="abs(x)")


def exp() -> NumericFunction:
    return NumericFunction(np.exp, np.exp, label="exp(x)")


def sin() -> NumericFunction:
    return NumericFunction(np.sin, np.cos, label="sin(x)")


def cos() -> NumericFunction:
    return NumericFunction(np.cos, lambda x: -np.sin(x), label="cos(x)")


def as_bounds(domain) -> tuple[float, float]:
    """(lo, hi) floats from an Interval or any pair."""
    if hasattr(domain, "lo"):
        lo, hi = domain.lo, domain.hi
    else:
        lo, hi = domain
    return float(lo), float(hi)


def uniform_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n closed, uniformly spaced points; both endpoints hit exactly."""
    if n < 2:
        raise ValueError("a grid needs at least 2 points")
    t = np.arange(n, dtype=float) / (n - 1)
    xs = lo + (hi - lo) * t
    xs[-1] = hi
    return xs
