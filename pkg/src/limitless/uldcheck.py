"""Grid verification of the uniform differentiability inequalities.

Each check sweeps a closed uniform grid and reports the smallest constant
making its inequality hold on that grid, the pair (or triple) where it is
attained, and, given a constant, how many grid points violate it:

* ULD:               |f(x) - f(a) - f'(a)(x - a)| <= K (x - a)^2
* m-differentiable:  same residual <= K |x - a| m(|x - a|)
* derivative:        |f'(x) - f'(a)| <= 2K m(|x - a|)
* quotient:          |Q(x, a) - Q(y, a)| <= 2K m(|x - y|),  Q(x, x) = f'(x)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MissingDerivative
from .moduli import Lipschitz, Modulus
from .numeric import NumericFunction, as_bounds, uniform_grid

SLACK = 2.0**-38
EXCLUDE = 2.0**-20  # pairs closer than EXCLUDE * width are skipped when extracting constants
MAX_QUOTIENT_GRID = 64


@dataclass(frozen=True)
class VerificationReport:
    inequality: str
    empirical_constant: float
    worst_pair: tuple[float, ...]
    violations: Optional[int]
    grid: dict
    K: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        out = {
            "inequality": self.inequality,
            "grid": self.grid,
            "empirical_constant": self.empirical_constant,
            "worst_pair": list(self.worst_pair),
            "violations": self.violations,
        }
        if self.K is not None:
            out["K"] = self.K
        out.update(self.extra)
        return out


def difference_quotient(f: NumericFunction, x: float, a: float) -> float:
    """(f(x) - f(a)) / (x - a), and f'(x) on the diagonal."""
    if x == a:
        if f.df is None:
            raise MissingDerivative(f"Q(x, x) needs a derivative handle for {f.label}")
        return f.derivative_at(x)
    return (f(x) - f(a)) / (x - a)


def _require_df(f: NumericFunction) -> None:
    if f.df is None:
        raise MissingDerivative(f"{f.label} has no derivative handle")


def _sample(f: NumericFunction, domain, grid_n: int):
    lo, hi = as_bounds(domain)
    xs = uniform_grid(lo, hi, grid_n)
    fx = f.values(xs)
    dfx = f.derivative_values(xs)
    scale = max(1.0, float(np.max(np.abs(fx))), float(np.max(np.abs(dfx))))
    return xs, fx, dfx, hi - lo, scale


def _extract(lhs, unit, mask, K, mult, slack):
    """Best constant max(lhs / (mult * unit)) over mask, its first argmax, violations."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mask & (unit > 0), lhs / (mult * unit), 0.0)
    # lhs > 0 where unit == 0 means no finite constant works
    ratio = np.where(mask & (unit <= 0) & (lhs > slack), np.inf, ratio)
    best = float(ratio.max()) if ratio.size else 0.0
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    violations = None
    if K is not None:
        violations = int(np.count_nonzero(lhs > mult * K * unit + slack))
    return best, idx, violations


def _grid_info(domain, grid_n):
    lo, hi = as_bounds(domain)
    return {"domain": [lo, hi], "n": grid_n}


def _residual_check(f, m, domain, grid_n, K, name):
    _require_df(f)
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    xs, fx, dfx, width, scale = _sample(f, domain, grid_n)
    diff = xs[:, None] - xs[None, :]  # row: x, column: a
    dist = np.abs(diff)
    resid = np.abs(fx[:, None] - fx[None, :] - dfx[None, :] * diff)
    unit = dist * np.asarray(m(dist))
    best, (i, j), violations = _extract(resid, unit, dist >= EXCLUDE * width, K, 1.0, SLACK * scale)
    return VerificationReport(name, best, (float(xs[i]), float(xs[j])), violations, _grid_info(domain, grid_n), K)


def verify_uld(f: NumericFunction, domain, grid_n: int, K: Optional[float] = None) -> VerificationReport:
    """Empirical K in |f(x) - f(a) - f'(a)(x - a)| <= K (x - a)^2; worst_pair is (x, a)."""
    return _residual_check(f, Lipschitz(1.0), domain, grid_n, K, "uld")


def verify_m_differentiable(
    f: NumericFunction, m: Modulus, domain, grid_n: int, K: Optional[float] = None
) -> VerificationReport:
    return _residual_check(f, m, domain, grid_n, K, "m_differentiable")


def derivative_lipschitz_check(f: NumericFunction, K: float, m: Modulus, domain, grid_n: int) -> VerificationReport:
    """Check |f'(x) - f'(a)| <= 2K m(|x - a|).

    The reported constant is the smallest K that passes, i.e. half the
    m-continuity constant of f'.
    """
    _require_df(f)
    xs, fx, dfx, width, scale = _sample(f, domain, grid_n)
    dist = np.abs(xs[:, None] - xs[None, :])
    lhs = np.abs(dfx[:, None] - dfx[None, :])
    unit = np.asarray(m(dist))
    best, (i, j), violations = _extract(lhs, unit, dist >= EXCLUDE * width, K, 2.0, SLACK * scale)
    return VerificationReport(
        "derivative_continuity", best, (float(xs[i]), float(xs[j])), violations, _grid_info(domain, grid_n), K
    )


def verify_quotient_continuity(
    f: NumericFunction, K: float, m: Modulus, domain, grid_n: int, max_grid: int = MAX_QUOTIENT_GRID
) -> VerificationReport:
    """Check |Q(x, a) - Q(y, a)| <= 2K m(|x - y|) on the full (x, y, a) grid.

    The diagonal Q(a, a) = f'(a) is included.  worst_pair is (x, y, a).
    """
    _require_df(f)
    if grid_n > max_grid:
        raise ValueError(f"3-D grid capped at {max_grid} points per axis (got {grid_n})")
    xs, fx, dfx, width, scale = _sample(f, domain, grid_n)
    diff = xs[:, None] - xs[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = (fx[:, None] - fx[None, :]) / diff
    Q[np.diag_indices(grid_n)] = dfx
    # axes: (x, y, a)
    lhs = np.abs(Q[:, None, :] - Q[None, :, :])
    dxy = np.abs(xs[:, None] - xs[None, :])
    unit = np.broadcast_to(np.asarray(m(dxy))[:, :, None], lhs.shape)
    mask = np.broadcast_to((dxy >= EXCLUDE * width)[:, :, None], lhs.shape)
    best, (i, k, j), violations = _extract(lhs, unit, mask, K, 2.0, SLACK * scale)
    return VerificationReport(
        "quotient_continuity",
        best,
        (float(xs[i]), float(xs[k]), float(xs[j])),
        violations,
        _grid_info(domain, grid_n),
        K,
    )


@dataclass(frozen=True)
class RefinementStudy:
    """Empirical constants across successively finer grids."""

    grid_sizes: tuple[int, ...]
    constants: tuple[float, ...]

    @property
    def growth(self) -> tuple[float, ...]:
        c = self.constants
        return tuple(b / a if a > 0 else float("inf") for a, b in zip(c, c[1:]))

    @property
    def spread(self) -> float:
        """max / min - 1 over all grids."""
        lo = min(self.constants)
        return max(self.constants) / lo - 1.0 if lo > 0 else float("inf")

    def stable(self, rel: float = 0.10) -> bool:
        return self.spread <= rel

    def diverging(self, factor: float = 1.5) -> bool:
        return all(g >= factor for g in self.growth)

    def to_json(self) -> dict:
        return {
            "grid_sizes": list(self.grid_sizes),
            "constants": list(self.constants),
            "growth": list(self.growth),
        }


def refinement_study(
    f: NumericFunction, domain, grid_sizes: Sequence[int], m: Optional[Modulus] = None
) -> RefinementStudy:
    """Re-run the m-differentiability check (ULD when m is None) on each grid."""
    m = m or Lipschitz(1.0)
    consts = tuple(verify_m_differentiable(f, m, domain, n).empirical_constant for n in grid_sizes)
    return RefinementStudy(tuple(grid_sizes), consts)
