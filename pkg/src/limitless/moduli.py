"""Moduli of continuity and the concave-majorant construction.

A modulus m is defined on [0, inf), has m(0) = 0, is non-decreasing, and is
subadditive.  Given sampled oscillations g(h) of a function, the upper edge
of the convex hull of the region under g is a concave, hence subadditive,
modulus dominating every sample.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidModulus, NegativeArgument, NegativeSample
from .numeric import NumericFunction, as_bounds, uniform_grid

SUBADDITIVE_TOL = 2.0**-40


def _check_t(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise NegativeArgument("a modulus of continuity is only defined for t >= 0")
    return arr


def _out(arr: np.ndarray, t):
    return float(arr) if np.ndim(t) == 0 else arr


@dataclass(frozen=True)
class Lipschitz:
    c: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0):
            raise InvalidModulus(f"Lipschitz constant must be finite and >= 0, got {self.c}")

    def __call__(self, t):
        arr = _check_t(t)
        return _out(self.c * arr, t)

    def to_json(self) -> dict:
        return {"kind": "lipschitz", "c": self.c}


@dataclass(frozen=True)
class Hoelder:
    c: float = 1.0
    gamma: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0):
            raise InvalidModulus(f"Hoelder constant must be finite and >= 0, got {self.c}")
        if not 0 < self.gamma <= 1:
            raise InvalidModulus(f"Hoelder exponent must lie in (0, 1], got {self.gamma}")

    def __call__(self, t):
        arr = _check_t(t)
        return _out(self.c * np.power(arr, self.gamma), t)

    def to_json(self) -> dict:
        return {"kind": "hoelder", "c": self.c, "gamma": self.gamma}


@dataclass(frozen=True)
class PiecewiseLinearConcave:
    """Linear interpolation through ``vertices``; linear extrapolation past the last.

    Construction enforces (0, 0) first, strictly increasing h, and segment
    slopes that are non-negative and non-increasing.  Concavity through the
    origin gives subadditivity.  Use :meth:`unchecked` to build an arbitrary
    piecewise-linear map (e.g. to exercise :func:`check_subadditive`).
    """

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(h), float(v)) for h, v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts or verts[0] != (0.0, 0.0):
            raise InvalidModulus("the first vertex must be (0, 0)")
        exact = [(Fraction(h), Fraction(v)) for h, v in verts]
        slopes = []
        for (h0, v0), (h1, v1) in zip(exact, exact[1:]):
            if not h1 > h0:
                raise InvalidModulus("vertex h values must be strictly increasing")
            slopes.append((v1 - v0) / (h1 - h0))
        if any(s < 0 for s in slopes):
            raise InvalidModulus("a modulus must be non-decreasing")
        if any(b > a for a, b in zip(slopes, slopes[1:])):
            raise InvalidModulus("segment slopes must be non-increasing (concavity)")

    @classmethod
    def unchecked(cls, vertices: Iterable[tuple[float, float]]) -> PiecewiseLinearConcave:
        obj = object.__new__(cls)
        object.__setattr__(obj, "vertices", tuple((float(h), float(v)) for h, v in vertices))
        return obj

    @property
    def final_slope(self) -> float:
        if len(self.vertices) < 2:
            return 0.0
        (h0, v0), (h1, v1) = self.vertices[-2:]
        return (v1 - v0) / (h1 - h0)

    def __call__(self, t):
        arr = _check_t(t)
        hs = np.array([h for h, _ in self.vertices])
        vs = np.array([v for _, v in self.vertices])
        inside = np.interp(arr, hs, vs)
        beyond = vs[-1] + self.final_slope * (arr - hs[-1])
        return _out(np.where(arr > hs[-1], beyond, inside), t)

    def to_json(self) -> dict:
        return {"kind": "piecewise_linear_concave", "vertices": [list(v) for v in self.vertices]}


Modulus = Union[Lipschitz, Hoelder, PiecewiseLinearConcave]


def modulus_from_json(data: dict) -> Modulus:
    kind = data.get("kind")
    if kind == "lipschitz":
        return Lipschitz(float(data.get("c", 1.0)))
    if kind == "hoelder":
        return Hoelder(float(data.get("c", 1.0)), float(data["gamma"]))
    if kind == "piecewise_linear_concave":
        return PiecewiseLinearConcave(tuple(tuple(v) for v in data["vertices"]))
    raise InvalidModulus(f"unknown modulus kind {kind!r}")


def eval_modulus(m: Modulus, t):
    return m(t)


@dataclass(frozen=True)
class SubadditivityReport:
    passed: bool
    worst_pair: tuple[float, float]
    worst_excess: float
    grid_n: int
    t_max: float

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "worst_pair": list(self.worst_pair),
            "worst_excess": self.worst_excess,
            "grid": {"n": self.grid_n, "t_max": self.t_max},
        }


def check_subadditive(m: Modulus, grid_n: int = 200, t_max: float = 1.0) -> SubadditivityReport:
    """Test m(s + t) <= m(s) + m(t) + 2^-40 over all pairs of a grid on [0, t_max].

    The reported worst pair is the first one (s, then t, ascending) whose
    excess is within the tolerance of the maximum.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    g = uniform_grid(0.0, float(t_max), grid_n)
    mg = np.asarray(m(g))
    excess = np.asarray(m(g[:, None] + g[None, :])) - mg[:, None] - mg[None, :]
    worst = float(excess.max())
    flat = int(np.flatnonzero(excess.ravel() >= worst - SUBADDITIVE_TOL)[0])
    i, j = divmod(flat, grid_n)
    return SubadditivityReport(
        passed=worst <= SUBADDITIVE_TOL,
        worst_pair=(float(g[i]), float(g[j])),
        worst_excess=worst,
        grid_n=grid_n,
        t_max=float(t_max),
    )


@dataclass(frozen=True)
class SampleSet:
    """Points (h, g) with g meant as an oscillation bound at separation h."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(h), float(g)) for h, g in self.points)
        hs = [h for h, _ in pts]
        if len(set(hs)) != len(hs):
            raise ValueError("sample h values must be distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_csv(cls, source: Union[str, io.TextIOBase]) -> SampleSet:
        """Read a two-column ``h,g`` CSV with a header row."""
        if isinstance(source, str):
            with open(source, newline="") as fh:
                return cls.from_csv(fh)
        reader = csv.reader(source)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["h", "g"]:
            raise ValueError("CSV header must be exactly 'h,g'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"line {lineno}: expected 2 columns, got {len(row)}")
            rows.append((float(row[0]), float(row[1])))
        return cls(tuple(rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "g"])
        for h, g in self.points:
            w.writerow([repr(h), repr(g)])
        return buf.getvalue()


def concave_majorant(samples: Union[SampleSet, Sequence[tuple[float, float]]]) -> PiecewiseLinearConcave:
    """Least concave piecewise-linear modulus through (0, 0) dominating the samples.

    Samples are made non-decreasing by a running maximum, then the upper hull
    is taken by a monotone-chain scan that drops collinear points.  Hull
    arithmetic is exact (floats convert to Fractions losslessly).
    """
    if not isinstance(samples, SampleSet):
        samples = SampleSet(tuple(samples))
    pts = []
    for h, g in samples.points:
        if not (h >= 0 and g >= 0) or math.isinf(h) or math.isinf(g):
            raise NegativeSample(f"samples must be finite and non-negative, got ({h}, {g})")
        if h == 0 and g != 0:
            raise ValueError("a modulus has m(0) = 0, so a sample at h = 0 must have g = 0")
        pts.append((h, g))
    pts.sort()
    if not pts or pts[0][0] != 0.0:
        pts.insert(0, (0.0, 0.0))
    running = 0.0
    mono = []
    for h, g in pts:
        running = max(running, g)
        mono.append((h, running))

    hull: list[tuple[float, float]] = []
    for p in mono:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return PiecewiseLinearConcave(tuple(hull))


def _cross(o, a, b) -> Fraction:
    oh, ov = Fraction(o[0]), Fraction(o[1])
    return (Fraction(a[0]) - oh) * (Fraction(b[1]) - ov) - (Fraction(a[1]) - ov) * (Fraction(b[0]) - oh)


def empirical_oscillation(f: NumericFunction, domain, grid_n: int, h_count: int) -> SampleSet:
    """Grid version of g(h) = sup{|f(x) - f(a)| : |x - a| <= h}.

    The separations sampled are h_count grid multiples of the spacing, spread
    evenly up to the domain width (h_count >= grid_n - 1 samples every
    separation).  The grid max under-approximates the continuum sup.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if h_count < 1:
        raise ValueError("h_count must be at least 1")
    lo, hi = as_bounds(domain)
    xs = uniform_grid(lo, hi, grid_n)
    fx = f.values(xs)
    per_sep = np.zeros(grid_n)
    for s in range(1, grid_n):
        per_sep[s] = np.max(np.abs(fx[s:] - fx[:-s]))
    upto = np.maximum.accumulate(per_sep)
    steps = sorted({max(1, round(k * (grid_n - 1) / h_count)) for k in range(1, h_count + 1)})
    width = hi - lo
    return SampleSet(tuple((width * s / (grid_n - 1), float(upto[s])) for s in steps))
