"""Two-variable checks: uniform differentiability, gradient continuity, mixed partials.

For scalar F on the plane the derivative at a point is the 1x2 row grad F,
so the operator norm of a derivative difference is the Euclidean norm of the
gradient difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidRectangle, MissingDerivative, MissingGradient
from .moduli import Modulus
from .numeric import as_bounds, uniform_grid
from .uldcheck import SLACK, VerificationReport

Fn2 = Callable[[np.ndarray, np.ndarray], np.ndarray]
Grad2 = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]

FD_STEP = 2.0**-20
LOOP_SLACK = 2.0**-30


@dataclass(frozen=True)
class VectorFunction2:
    f: Fn2
    grad: Optional[Grad2] = None
    f_xy: Optional[Fn2] = None
    f_yx: Optional[Fn2] = None
    label: str = "F"

    def gradient(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        if self.grad is None:
            raise MissingGradient(f"{self.label} has no gradient handle")
        gx, gy = self.grad(x, y)
        shape = np.broadcast(x, y).shape
        return np.broadcast_to(np.asarray(gx, float), shape), np.broadcast_to(np.asarray(gy, float), shape)


def _box_bounds(box):
    (x0, x1), (y0, y1) = (as_bounds(box[0]), as_bounds(box[1]))
    return x0, x1, y0, y1


def _base_grid(box, grid_n):
    x0, x1, y0, y1 = _box_bounds(box)
    X, Y = np.meshgrid(uniform_grid(x0, x1, grid_n), uniform_grid(y0, y1, grid_n), indexing="ij")
    return X.ravel(), Y.ravel()


def increments(box, dir_count: int, mag_count: int = 8) -> np.ndarray:
    """dir_count equally spaced directions times mag_count halving magnitudes.

    Magnitudes run from half the shorter box side downward by factors of 2.
    Returns an array of shape (dir_count * mag_count, 2).
    """
    x0, x1, y0, y1 = _box_bounds(box)
    side = min(x1 - x0, y1 - y0)
    theta = 2 * np.pi * np.arange(dir_count) / dir_count
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    mags = side * 2.0 ** -(np.arange(mag_count) + 1.0)
    return (mags[None, :, None] * dirs[:, None, :]).reshape(-1, 2)


def verify_multivar_differentiable(
    F: VectorFunction2,
    m: Modulus,
    box,
    grid_n: int,
    dir_count: int,
    mag_count: int = 8,
    K: Optional[float] = None,
) -> VerificationReport:
    """Empirical K in |F(x + h) - F(x) - grad F(x) . h| <= K |h| m(|h|).

    Base points form a grid_n^2 grid; increments leaving the box are skipped.
    worst_pair is (x1, x2, h1, h2).
    """
    if F.grad is None:
        raise MissingGradient(f"{F.label} has no gradient handle")
    x0, x1, y0, y1 = _box_bounds(box)
    px, py = _base_grid(box, grid_n)
    H = increments(box, dir_count, mag_count)
    qx = px[:, None] + H[None, :, 0]
    qy = py[:, None] + H[None, :, 1]
    inside = (qx >= x0) & (qx <= x1) & (qy >= y0) & (qy <= y1)
    fp = np.asarray(F.f(px, py), float)
    gx, gy = F.gradient(px, py)
    fq = np.asarray(F.f(np.where(inside, qx, px[:, None]), np.where(inside, qy, py[:, None])), float)
    resid = np.abs(fq - fp[:, None] - gx[:, None] * H[None, :, 0] - gy[:, None] * H[None, :, 1])
    hn = np.hypot(H[:, 0], H[:, 1])
    unit = np.broadcast_to(hn * np.asarray(m(hn)), resid.shape)
    scale = max(1.0, float(np.max(np.abs(fp))))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(inside & (unit > 0), resid / unit, 0.0)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    violations = None
    if K is not None:
        violations = int(np.count_nonzero(inside & (resid > K * unit + SLACK * scale)))
    return VerificationReport(
        "multivar_differentiable",
        float(ratio.max()),
        (float(px[i]), float(py[i]), float(H[j, 0]), float(H[j, 1])),
        violations,
        {"box": [[x0, x1], [y0, y1]], "n": grid_n, "directions": dir_count, "magnitudes": mag_count},
        K,
    )


def verify_gradient_continuity(F: VectorFunction2, K: float, m: Modulus, box, grid_n: int) -> VerificationReport:
    """Check |grad F(p) - grad F(q)| <= 6K m(|p - q|) over all pairs of grid points.

    The reported constant is the smallest K that passes.  worst_pair is
    (p1, p2, q1, q2).
    """
    x0, x1, y0, y1 = _box_bounds(box)
    px, py = _base_grid(box, grid_n)
    gx, gy = F.gradient(px, py)
    lhs = np.hypot(gx[:, None] - gx[None, :], gy[:, None] - gy[None, :])
    dist = np.hypot(px[:, None] - px[None, :], py[:, None] - py[None, :])
    unit = np.asarray(m(dist))
    scale = max(1.0, float(np.max(np.abs(gx))), float(np.max(np.abs(gy))))
    slack = SLACK * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(unit > 0, lhs / (6.0 * unit), np.where(lhs > slack, np.inf, 0.0))
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    violations = int(np.count_nonzero(lhs > 6.0 * K * unit + slack))
    return VerificationReport(
        "gradient_continuity",
        float(ratio.max()),
        (float(px[i]), float(py[i]), float(px[j]), float(py[j])),
        violations,
        {"box": [[x0, x1], [y0, y1]], "n": grid_n},
        K,
    )


def three_path_check(F: VectorFunction2, K: float, m: Modulus, points, hs, ks) -> tuple[float, int]:
    """Witness the path-splitting step behind the 6K bound.

    For every (x, h, k) with x from ``points``, h from ``hs``, k from ``ks``:
        |grad F(x) . k - grad F(x + h) . k|
            <= K (|h| m(|h|) + |k| m(|k|) + |h + k| m(|h + k|)).
    Returns (max lhs / rhs, number of violations beyond rounding slack).
    """
    P = np.asarray(points, float)[:, None, None, :]
    Hs = np.asarray(hs, float)[None, :, None, :]
    Ks = np.asarray(ks, float)[None, None, :, :]
    P, Hs, Ks = np.broadcast_arrays(P, Hs, Ks)
    g0x, g0y = F.gradient(P[..., 0], P[..., 1])
    g1x, g1y = F.gradient(P[..., 0] + Hs[..., 0], P[..., 1] + Hs[..., 1])
    lhs = np.abs((g0x - g1x) * Ks[..., 0] + (g0y - g1y) * Ks[..., 1])

    def term(v):
        n = np.hypot(v[..., 0], v[..., 1])
        return n * np.asarray(m(n))

    rhs = K * (term(Hs) + term(Ks) + term(Hs + Ks))
    scale = max(1.0, float(np.max(np.abs(g0x))), float(np.max(np.abs(g0y))))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, 0.0)
    return float(ratio.max()), int(np.count_nonzero(lhs > rhs + SLACK * scale))


def _check_rect(rect):
    a, b, c, d = (float(t) for t in rect)
    if not (a < b and c < d):
        raise InvalidRectangle(f"need a < b and c < d, got {rect}")
    return a, b, c, d


def _partials(F: VectorFunction2):
    if F.grad is not None:
        return (lambda x, y: F.gradient(x, y)[0]), (lambda x, y: F.gradient(x, y)[1])
    h = FD_STEP

    def fx(x, y):
        return (np.asarray(F.f(x + h, y)) - np.asarray(F.f(x - h, y))) / (2 * h)

    def fy(x, y):
        return (np.asarray(F.f(x, y + h)) - np.asarray(F.f(x, y - h))) / (2 * h)

    return fx, fy


def _midpoint(g, t0: float, t1: float, n: int) -> float:
    h = (t1 - t0) / n
    mids = t0 + (np.arange(1, n + 1, dtype=float) - 0.5) * h
    return h * math.fsum(np.asarray(g(mids), float).ravel())


def greens_loop_residual(F: VectorFunction2, rect, n_quad: int) -> float:
    """Difference of the two edge paths from (a, c) to (b, d).

    R = [int_a^b f_x(x, c) dx + int_c^d f_y(b, y) dy]
        - [int_c^d f_y(a, y) dy + int_a^b f_x(x, d) dx],
    each edge by composite midpoint with n_quad panels.  Partials come from
    the gradient handle, else from central differences with step 2^-20.
    """
    a, b, c, d = _check_rect(rect)
    if n_quad < 1:
        raise ValueError("n_quad must be at least 1")
    fx, fy = _partials(F)
    via_b = _midpoint(lambda t: fx(t, np.full_like(t, c)), a, b, n_quad) + _midpoint(
        lambda t: fy(np.full_like(t, b), t), c, d, n_quad
    )
    via_d = _midpoint(lambda t: fy(np.full_like(t, a), t), c, d, n_quad) + _midpoint(
        lambda t: fx(t, np.full_like(t, d)), a, b, n_quad
    )
    return via_b - via_d


def _double_midpoint(g, a, b, c, d, n) -> float:
    hx, hy = (b - a) / n, (d - c) / n
    mx = a + (np.arange(1, n + 1, dtype=float) - 0.5) * hx
    my = c + (np.arange(1, n + 1, dtype=float) - 0.5) * hy
    X, Y = np.meshgrid(mx, my, indexing="ij")
    return hx * hy * math.fsum(np.asarray(g(X, Y), float).ravel())


@dataclass(frozen=True)
class MixedPartialsReport:
    value: float
    loop_residual: float
    tolerance: float
    passed: bool
    rect: tuple[float, float, float, float]
    n_quad: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "loop_residual": self.loop_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "rect": list(self.rect),
            "n_quad": self.n_quad,
        }


def mixed_partials_check(F: VectorFunction2, rect, n_quad: int) -> MixedPartialsReport:
    """Integrate f_xy - f_yx over the rectangle and compare with the loop residual.

    The loop residual equals minus that integral, so both should vanish
    together.  The tolerance is 2^-30 plus the change of each estimate when
    the panel count is halved (a second-order error model).
    """
    a, b, c, d = _check_rect(rect)
    if F.f_xy is None or F.f_yx is None:
        raise MissingDerivative(f"{F.label} needs f_xy and f_yx handles")
    if n_quad < 2:
        raise ValueError("n_quad must be at least 2")

    def integrand(x, y):
        return np.asarray(F.f_xy(x, y), float) - np.asarray(F.f_yx(x, y), float)

    value = _double_midpoint(integrand, a, b, c, d, n_quad)
    coarse_value = _double_midpoint(integrand, a, b, c, d, n_quad // 2)
    R = greens_loop_residual(F, (a, b, c, d), n_quad)
    R_coarse = greens_loop_residual(F, (a, b, c, d), n_quad // 2)
    tol = LOOP_SLACK + abs(R - R_coarse) + abs(value - coarse_value)
    passed = abs(value) <= tol and abs(value + R) <= tol
    return MixedPartialsReport(value, R, tol, passed, (a, b, c, d), n_quad)
