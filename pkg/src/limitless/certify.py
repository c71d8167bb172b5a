"""Sound bounds by exact interval arithmetic.

Everything here is rational: interval endpoints are Fractions, so an enclosure
can only be loose, never wrong.  Three products are built on top of it:

* ``basic_estimate_constant`` -- K with |p(x) - p(a) - p'(a)(x - a)| <= K (x - a)^2,
  taken as a bound on |r(x, a)| over domain x domain;
* ``derivative_bound`` -- M with |p'| <= M, hence |p(x) - p(a)| <= M |x - a|;
* ``monotonicity_certificate`` -- a partition of [A, B] into steps no longer
  than C/K along which p is checked to be non-decreasing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import DerivativeLowerBoundNotCertified, InvalidC, LimitlessError
from .ratpoly import (
    BivariatePolynomial,
    Polynomial,
    RationalLike,
    derivative,
    format_rational,
    parse_rational,
    tangent_remainder,
    to_rational,
)

DEFAULT_DEPTH = 6


class CertificateError(LimitlessError):
    """A certificate failed re-validation."""


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_rational(self.lo), to_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, c: RationalLike) -> Interval:
        c = to_rational(c)
        return cls(c, c)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def magnitude(self) -> Fraction:
        """max |t| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def contains(self, t) -> bool:
        t = to_rational(t)
        return self.lo <= t <= self.hi

    def __contains__(self, t) -> bool:
        return self.contains(t)

    def subset_of(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other) -> Interval:
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> Interval:
        return self + (-_as_interval(other))

    def __rsub__(self, other) -> Interval:
        return _as_interval(other) - self

    def __mul__(self, other) -> Interval:
        other = _as_interval(other)
        return Interval(*_mul((self.lo, self.hi), (other.lo, other.hi)))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Interval:
        return Interval(*_pow((self.lo, self.hi), k))

    def split(self, n: int) -> list[Interval]:
        """Uniform subdivision into n closed pieces, left to right."""
        step = self.width / n
        return [Interval(self.lo + i * step, self.lo + (i + 1) * step) for i in range(n)]

    def to_json(self) -> list[str]:
        return [format_rational(self.lo), format_rational(self.hi)]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> Interval:
        return cls(parse_rational(data[0]), parse_rational(data[1]))

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _as_interval(v) -> Interval:
    return v if isinstance(v, Interval) else Interval.point(v)


# Endpoint-pair kernels; the hot loops below avoid dataclass overhead.

def _mul(u, v):
    p = (u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    return min(p), max(p)


def _pow(u, k: int):
    """Exact range of t^k over [lo, hi]."""
    if k < 0:
        raise ValueError("negative interval power")
    lo, hi = u
    if k == 0:
        return Fraction(1), Fraction(1)
    if k % 2 == 1 or lo >= 0:
        return lo**k, hi**k
    if hi <= 0:
        return hi**k, lo**k
    return Fraction(0), max(lo**k, hi**k)


def _powers(u, deg: int):
    return [_pow(u, k) for k in range(deg + 1)]


def _dot(coeffs, powers):
    """Enclosure of sum_k coeffs[k] * T^k given the exact power ranges of T."""
    lo = hi = Fraction(0)
    for c, (plo, phi) in zip(coeffs, powers):
        if c > 0:
            lo += c * plo
            hi += c * phi
        elif c < 0:
            lo += c * phi
            hi += c * plo
    return lo, hi


def _eval_uni(p: Polynomial, u):
    return _dot(p.coeffs, _powers(u, p.degree))


def _eval_bi(b: BivariatePolynomial, x_pows, a_pows):
    # x^i * (sum_j c_ij a^j): row sums first, which is never looser than the
    # full monomial expansion (interval multiplication is subdistributive).
    lo = hi = Fraction(0)
    for i, row in enumerate(b.coeffs):
        s = _dot(row, a_pows)
        if s == (0, 0):
            continue
        m = _mul(x_pows[i], s)
        lo += m[0]
        hi += m[1]
    return lo, hi


def interval_eval(
    poly: Union[Polynomial, BivariatePolynomial],
    box: Union[Interval, tuple[Interval, Interval]],
) -> Interval:
    """Enclosure of the range of ``poly`` over ``box``.

    Powers use their exact range, so x^2 over [-1, 1] gives [0, 1].
    """
    if isinstance(poly, BivariatePolynomial):
        bx, ba = box
        if poly.is_zero():
            return Interval.point(0)
        xp = _powers((bx.lo, bx.hi), poly.degree_x)
        ap = _powers((ba.lo, ba.hi), poly.degree_a)
        return Interval(*_eval_bi(poly, xp, ap))
    if isinstance(box, tuple):
        raise TypeError("a univariate polynomial takes a single Interval")
    return Interval(*_eval_uni(poly, (box.lo, box.hi)))


class Quantity(str, enum.Enum):
    K_BASIC_ESTIMATE = "K_basic_estimate"
    M_DERIVATIVE_BOUND = "M_derivative_bound"


@dataclass(frozen=True)
class CertifiedBound:
    """``value`` is a sound upper bound for ``quantity`` over ``domain``."""

    value: Fraction
    quantity: Quantity
    domain: Interval
    depth: int

    def to_json(self) -> dict:
        return {
            "value": format_rational(self.value),
            "quantity": self.quantity.value,
            "domain": self.domain.to_json(),
            "depth": self.depth,
        }

    @classmethod
    def from_json(cls, data: dict) -> CertifiedBound:
        return cls(
            value=parse_rational(data["value"]),
            quantity=Quantity(data["quantity"]),
            domain=Interval.from_json(data["domain"]),
            depth=int(data["depth"]),
        )


def _check_depth(depth: int) -> None:
    if not isinstance(depth, int) or depth < 0:
        raise ValueError(f"depth must be a non-negative integer, got {depth!r}")


def basic_estimate_constant(p: Polynomial, domain: Interval, depth: int = DEFAULT_DEPTH) -> CertifiedBound:
    """K >= sup |r(x, a)| over domain^2, from a 2^depth x 2^depth grid of boxes."""
    _check_depth(depth)
    r = tangent_remainder(p)
    if r.is_zero():
        return CertifiedBound(Fraction(0), Quantity.K_BASIC_ESTIMATE, domain, depth)
    pieces = [(s.lo, s.hi) for s in domain.split(2**depth)]
    xp = [_powers(u, r.degree_x) for u in pieces]
    ap = [_powers(u, r.degree_a) for u in pieces]
    best = Fraction(0)
    for xs in xp:
        for as_ in ap:
            lo, hi = _eval_bi(r, xs, as_)
            best = max(best, -lo, hi)
    return CertifiedBound(best, Quantity.K_BASIC_ESTIMATE, domain, depth)


def derivative_bound(p: Polynomial, domain: Interval, depth: int = DEFAULT_DEPTH) -> CertifiedBound:
    """M >= sup |p'| over the domain (Rule of Bounded Change constant)."""
    _check_depth(depth)
    dp = derivative(p)
    best = Fraction(0)
    for s in domain.split(2**depth):
        lo, hi = _eval_uni(dp, (s.lo, s.hi))
        best = max(best, -lo, hi)
    return CertifiedBound(best, Quantity.M_DERIVATIVE_BOUND, domain, depth)


def range_enclosure(p: Polynomial, domain: Interval, depth: int = DEFAULT_DEPTH) -> Interval:
    """Hull of the enclosures of p over 2^depth uniform pieces of the domain."""
    _check_depth(depth)
    parts = [_eval_uni(p, (s.lo, s.hi)) for s in domain.split(2**depth)]
    return Interval(min(u[0] for u in parts), max(u[1] for u in parts))


def certify_lower_bound(p: Polynomial, domain: Interval, C: RationalLike, depth: int = DEFAULT_DEPTH) -> int:
    """Show p >= C on the domain by bisection down to at most ``depth`` levels.

    Returns the number of subintervals used.  Raises
    DerivativeLowerBoundNotCertified when some piece at full depth still has
    an enclosure dipping below C, or when an exact point value is below C.
    """
    _check_depth(depth)
    C = to_rational(C)
    stack = [(domain, 0)]
    used = 0
    while stack:
        piece, level = stack.pop()
        lo, hi = _eval_uni(p, (piece.lo, piece.hi))
        if lo >= C:
            used += 1
            continue
        mid = piece.midpoint
        if p(mid) < C:
            raise DerivativeLowerBoundNotCertified(
                f"value {p(mid)} < {C} at x = {mid}; the lower bound is false",
                subinterval=piece,
                enclosure=Interval(lo, hi),
            )
        if level >= depth:
            raise DerivativeLowerBoundNotCertified(
                f"enclosure [{lo}, {hi}] on {piece} dips below {C} at depth {depth}",
                subinterval=piece,
                enclosure=Interval(lo, hi),
            )
        # right half pushed first so the left half is processed first
        stack.append((Interval(mid, piece.hi), level + 1))
        stack.append((Interval(piece.lo, mid), level + 1))
    return used


@dataclass(frozen=True)
class MonotonicityCertificate:
    p: Polynomial
    domain: Interval
    C: Fraction
    K: CertifiedBound
    partition: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    @property
    def depth(self) -> int:
        return self.K.depth

    @property
    def max_step(self) -> Fraction | None:
        """C/K, or None when K = 0 (p linear, any step is fine)."""
        return None if self.K.value == 0 else self.C / self.K.value

    def to_json(self) -> dict:
        return {
            "polynomial": self.p.to_json(),
            "domain": self.domain.to_json(),
            "C": format_rational(self.C),
            "K": format_rational(self.K.value),
            "depth": self.depth,
            "partition": [format_rational(t) for t in self.partition],
            "values": [format_rational(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> MonotonicityCertificate:
        domain = Interval.from_json(data["domain"])
        return cls(
            p=Polynomial.from_json(data["polynomial"]),
            domain=domain,
            C=parse_rational(data["C"]),
            K=CertifiedBound(parse_rational(data["K"]), Quantity.K_BASIC_ESTIMATE, domain, int(data["depth"])),
            partition=tuple(parse_rational(t) for t in data["partition"]),
            values=tuple(parse_rational(v) for v in data["values"]),
        )


def monotonicity_certificate(
    p: Polynomial, domain: Interval, C: RationalLike, depth: int = DEFAULT_DEPTH
) -> MonotonicityCertificate:
    """Certify p(A) <= p(B) on domain = [A, B] from p' >= C > 0.

    On a step 0 < x - a <= C/K the basic estimate gives
    p(x) - p(a) >= C (x - a) - K (x - a)^2 >= 0, so walking from A to B in
    such steps never decreases p.
    """
    C = to_rational(C)
    if C <= 0:
        raise InvalidC(f"C must be positive, got {C}")
    certify_lower_bound(derivative(p), domain, C, depth)
    K = basic_estimate_constant(p, domain, depth)
    A, B = domain.lo, domain.hi
    if A == B:
        partition = (A,)
    elif K.value == 0:
        partition = (A, B)
    else:
        n = math.ceil(domain.width * K.value / C)
        partition = tuple(A + i * domain.width / n for i in range(n)) + (B,)
    values = tuple(p(t) for t in partition)
    cert = MonotonicityCertificate(p, domain, C, K, partition, values)
    validate_certificate(cert, recompute_bounds=False)
    return cert


def validate_certificate(cert: MonotonicityCertificate | dict, recompute_bounds: bool = True) -> MonotonicityCertificate:
    """Re-check a certificate from scratch with exact arithmetic.

    With ``recompute_bounds`` the stored K must also be at least the freshly
    computed one at the stored depth, and p' >= C is re-certified.
    """
    if isinstance(cert, dict):
        cert = MonotonicityCertificate.from_json(cert)
    t, v = cert.partition, cert.values
    if cert.C <= 0:
        raise CertificateError("C must be positive")
    if not t or t[0] != cert.domain.lo or t[-1] != cert.domain.hi:
        raise CertificateError("partition does not span the domain")
    if len(v) != len(t):
        raise CertificateError("one value per partition point required")
    step = cert.max_step
    for i in range(len(t) - 1):
        if not t[i] < t[i + 1]:
            raise CertificateError(f"partition not increasing at index {i}")
        if step is not None and t[i + 1] - t[i] > step:
            raise CertificateError(f"step {t[i + 1] - t[i]} exceeds C/K = {step}")
    for i, (ti, vi) in enumerate(zip(t, v)):
        if cert.p(ti) != vi:
            raise CertificateError(f"stored value at t_{i} = {ti} is wrong")
    for i in range(len(v) - 1):
        if v[i] > v[i + 1]:
            raise CertificateError(f"p decreases between t_{i} and t_{i + 1}")
    if recompute_bounds:
        fresh = basic_estimate_constant(cert.p, cert.domain, cert.depth)
        if cert.K.value < fresh.value:
            raise CertificateError(f"stored K = {cert.K.value} below certified {fresh.value}")
        try:
            certify_lower_bound(derivative(cert.p), cert.domain, cert.C, cert.depth)
        except DerivativeLowerBoundNotCertified as exc:
            raise CertificateError(f"p' >= C not re-certified: {exc}") from exc
    return cert


def fraction_to_float_up(r: Fraction) -> float:
    """Smallest binary64 value >= r."""
    f = float(r)
    if Fraction(f) < r:
        f = math.nextafter(f, math.inf)
    return f
