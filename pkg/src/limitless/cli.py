"""Command-line interface.

Exit codes: 0 success, 1 verification failure (violations found or a claim
not certified), 2 usage, parse, or input-domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import certify, moduli, multivar, quad, ratpoly, uldcheck
from .errors import DerivativeLowerBoundNotCertified, LimitlessError
from .expr import is_polynomial, parse, to_function, to_function2, to_polynomial
from .numeric import polynomial as poly_function
from .ratpoly import format_rational, to_rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEPTH_ENV = "LIMITLESS_DEPTH"


class UsageError(Exception):
    pass


@dataclass
class CommandResult:
    text: str
    payload: Optional[dict] = None
    code: int = EXIT_OK
    show_payload: bool = False

    def render(self, as_json: bool) -> str:
        if as_json:
            return _dumps(self.payload if self.payload is not None else {"text": self.text})
        if self.show_payload and self.payload is not None:
            return f"{self.text}\n{_dumps(self.payload)}"
        return self.text


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _dumps(payload) -> str:
    return json.dumps(_finite(payload), indent=2, allow_nan=False)


def real(x: float) -> str:
    return f"{x:.17g}"


def default_depth() -> int:
    raw = os.environ.get(DEPTH_ENV)
    if raw is None:
        return certify.DEFAULT_DEPTH
    try:
        depth = int(raw)
    except ValueError:
        raise UsageError(f"{DEPTH_ENV} must be a non-negative integer, got {raw!r}") from None
    if depth < 0:
        raise UsageError(f"{DEPTH_ENV} must be a non-negative integer, got {raw!r}")
    return depth


def _depth(args) -> int:
    if args.depth is None:
        return default_depth()
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    return args.depth


def _interval(args) -> certify.Interval:
    lo, hi = (to_rational(v) for v in args.interval)
    if lo > hi:
        raise UsageError(f"--interval needs A <= B, got {lo} > {hi}")
    return certify.Interval(lo, hi)


def _open_interval(args) -> tuple[float, float]:
    iv = _interval(args)
    if iv.lo == iv.hi:
        raise UsageError("--interval needs A < B")
    return float(iv.lo), float(iv.hi)


def parse_modulus(text: str) -> moduli.Modulus:
    """``lipschitz[:c]``, ``hoelder:c:gamma`` (or ``holder``), or ``@file.json``."""
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return moduli.modulus_from_json(json.load(fh))
    kind, *rest = text.split(":")
    kind = kind.strip().lower()
    try:
        vals = [float(to_rational(v)) for v in rest]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad modulus parameters in {text!r}") from exc
    if kind == "lipschitz" and len(vals) <= 1:
        return moduli.Lipschitz(*vals)
    if kind in ("hoelder", "holder") and len(vals) == 2:
        return moduli.Hoelder(*vals)
    raise UsageError(f"unknown modulus {text!r}; use lipschitz[:c], hoelder:c:gamma or @file.json")


def _poly(args) -> ratpoly.Polynomial:
    return to_polynomial(parse(args.expr))


def _function(args):
    return to_function(parse(args.expr))


# -- command handlers -------------------------------------------------------------


def cmd_diff(args) -> CommandResult:
    p = _poly(args)
    dp = ratpoly.derivative(p)
    return CommandResult(dp.to_text(), {"input": p.to_text(), "derivative": dp.to_text(), "coefficients": dp.to_json()})


def cmd_factor_q(args) -> CommandResult:
    p = _poly(args)
    q = ratpoly.divided_difference(p)
    return CommandResult(q.to_text(), {"input": p.to_text(), "q": q.to_text(), "coefficients": q.to_json()})


def cmd_factor_r(args) -> CommandResult:
    p = _poly(args)
    r = ratpoly.tangent_remainder(p)
    return CommandResult(r.to_text(), {"input": p.to_text(), "r": r.to_text(), "coefficients": r.to_json()})


def cmd_bound_k(args) -> CommandResult:
    b = certify.basic_estimate_constant(_poly(args), _interval(args), _depth(args))
    return CommandResult(f"K <= {b.value} (~{real(float(b.value))})", b.to_json(), show_payload=True)


def cmd_bound_m(args) -> CommandResult:
    b = certify.derivative_bound(_poly(args), _interval(args), _depth(args))
    return CommandResult(f"M <= {b.value} (~{real(float(b.value))})", b.to_json(), show_payload=True)


def cmd_monotone(args) -> CommandResult:
    p = _poly(args)
    domain = _interval(args)
    try:
        cert = certify.monotonicity_certificate(p, domain, to_rational(args.c), _depth(args))
    except DerivativeLowerBoundNotCertified as exc:
        return CommandResult(f"not certified: {exc}", {"certified": False, "reason": str(exc)}, EXIT_FAIL)
    text = (
        f"certified: p({domain.lo}) = {cert.values[0]} <= p({domain.hi}) = {cert.values[-1]} "
        f"in {len(cert.partition) - 1} step(s), K = {cert.K.value}"
    )
    return CommandResult(text, cert.to_json(), show_payload=True)


def cmd_integrate(args) -> CommandResult:
    p = _poly(args)
    iv = _interval(args)
    value = quad.integrate_poly(p, iv.lo, iv.hi)
    P = quad.antiderivative(p)
    return CommandResult(
        format_rational(value) if value.denominator != 1 else str(value.numerator),
        {"antiderivative": P.to_text(), "interval": iv.to_json(), "value": format_rational(value)},
    )


def cmd_enclose(args) -> CommandResult:
    a, b = _open_interval(args)
    e = parse(args.expr)
    exact = None
    if is_polynomial(e):
        p = to_polynomial(e)
        f = poly_function(p)
        if args.lipschitz is None:
            M = certify.derivative_bound(p, _interval(args), _depth(args)).value
            L = certify.fraction_to_float_up(M)
        else:
            L = args.lipschitz
        exact = quad.integrate_poly(p, _interval(args).lo, _interval(args).hi)
    else:
        if args.lipschitz is None:
            raise UsageError("--lipschitz is required for non-polynomial integrands")
        f, L = to_function(e), args.lipschitz
    enc = quad.riemann_enclosure(f, L, a, b, args.n)
    payload = enc.to_json()
    text = f"integral in [{real(enc.lower)}, {real(enc.upper)}] (midpoint sum {real(enc.midpoint_sum)}, L = {real(L)})"
    code = EXIT_OK
    if exact is not None:
        payload["exact"] = format_rational(exact)
        inside = enc.contains(float(exact))
        payload["contains_exact"] = inside
        text += f"\nexact value {exact} {'inside' if inside else 'OUTSIDE'}"
        code = EXIT_OK if inside else EXIT_FAIL
    return CommandResult(text, payload, code, show_payload=True)


def _report_text(r: uldcheck.VerificationReport) -> str:
    line = f"{r.inequality}: empirical constant {real(r.empirical_constant)} at {tuple(real(v) for v in r.worst_pair)}"
    if r.violations is not None:
        line += f"; {r.violations} violation(s) with K = {real(r.K)}"
    return line


def _verdict(reports) -> int:
    return EXIT_FAIL if any(r.violations for r in reports) else EXIT_OK


def cmd_verify_uld(args) -> CommandResult:
    f = _function(args)
    domain = _open_interval(args)
    uld = uldcheck.verify_uld(f, domain, args.grid, args.k)
    K = args.k if args.k is not None else uld.empirical_constant
    deriv = uldcheck.derivative_lipschitz_check(f, K, moduli.Lipschitz(1.0), domain, args.grid)
    reports = [uld, deriv]
    payload = {"uld": uld.to_json(), "derivative_continuity": deriv.to_json()}
    return CommandResult("\n".join(_report_text(r) for r in reports), payload, _verdict(reports), True)


def cmd_verify_m(args) -> CommandResult:
    f = _function(args)
    m = parse_modulus(args.modulus)
    r = uldcheck.verify_m_differentiable(f, m, _open_interval(args), args.grid, args.k)
    return CommandResult(_report_text(r), r.to_json(), _verdict([r]), True)


def cmd_verify_quotient(args) -> CommandResult:
    f = _function(args)
    m = parse_modulus(args.modulus)
    domain = _open_interval(args)
    K = args.k
    if K is None:
        K = uldcheck.verify_m_differentiable(f, m, domain, args.grid).empirical_constant
    r = uldcheck.verify_quotient_continuity(f, K, m, domain, args.grid)
    return CommandResult(_report_text(r), r.to_json(), _verdict([r]), True)


def cmd_modulus_fit(args) -> CommandResult:
    try:
        samples = moduli.SampleSet.from_csv(args.csv)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc}") from exc
    m = moduli.concave_majorant(samples)
    last = m.vertices[-1][0] or 1.0
    check = moduli.check_subadditive(m, 200, 2 * last)
    text = f"{len(m.vertices)} vertices; subadditive on [0, {real(2 * last)}]: {check.passed}"
    return CommandResult(text, m.to_json(), EXIT_OK if check.passed else EXIT_FAIL, True)


def _box(args):
    a, b, c, d = (float(to_rational(v)) for v in args.box)
    if not (a < b and c < d):
        raise UsageError("--box needs A < B and C < D")
    return ((a, b), (c, d))


def cmd_multivar_verify(args) -> CommandResult:
    F = to_function2(parse(args.expr, ("x", "y")))
    m = parse_modulus(args.modulus)
    box = _box(args)
    r = multivar.verify_multivar_differentiable(F, m, box, args.grid, args.dirs, args.mags, args.k)
    K = args.k if args.k is not None else r.empirical_constant
    g = multivar.verify_gradient_continuity(F, K, m, box, args.grid)
    reports = [r, g]
    payload = {"differentiable": r.to_json(), "gradient_continuity": g.to_json()}
    return CommandResult("\n".join(_report_text(x) for x in reports), payload, _verdict(reports), True)


def _rect(args):
    return tuple(float(to_rational(v)) for v in args.rect)


def cmd_greens_loop(args) -> CommandResult:
    F = to_function2(parse(args.expr, ("x", "y")))
    R = multivar.greens_loop_residual(F, _rect(args), args.n)
    return CommandResult(real(R), {"rect": list(_rect(args)), "n_quad": args.n, "residual": R})


def cmd_mixed_partials(args) -> CommandResult:
    F = to_function2(parse(args.expr, ("x", "y")))
    rep = multivar.mixed_partials_check(F, _rect(args), args.n)
    text = (
        f"integral of f_xy - f_yx = {real(rep.value)}, loop residual {real(rep.loop_residual)}, "
        f"tolerance {real(rep.tolerance)}: {'pass' if rep.passed else 'FAIL'}"
    )
    return CommandResult(text, rep.to_json(), EXIT_OK if rep.passed else EXIT_FAIL, True)


def cmd_power_sum(args) -> CommandResult:
    if args.n < 0 or args.k < 0:
        raise UsageError("power-sum needs N >= 0 and K >= 0")
    s = quad.power_sum(args.n, args.k)
    return CommandResult(str(s), {"n": args.n, "k": args.k, "sum": str(s)})


# -- argument parsing ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting a --json given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print only the JSON payload")

    parser = _Parser(prog="limitless", description="Calculus without limits.")
    parser.add_argument("--json", action="store_true", help="print only the JSON payload")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, handler, help_text, expr=True):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        if expr:
            sp.add_argument("expr", help="expression text, e.g. 'x^3 - 2*x'")
        sp.set_defaults(handler=handler)
        return sp

    def interval(sp):
        sp.add_argument("--interval", nargs=2, metavar=("A", "B"), required=True)

    def depth(sp):
        sp.add_argument("--depth", type=int, default=None, help=f"bisection depth (default ${DEPTH_ENV} or 6)")

    add("diff", cmd_diff, "derivative of a polynomial")
    add("factor-q", cmd_factor_q, "q(x, a) with p(x) - p(a) = (x - a) q(x, a)")
    add("factor-r", cmd_factor_r, "r(x, a) with p(x) - p(a) - p'(a)(x - a) = (x - a)^2 r(x, a)")
    for name, handler, text in (
        ("bound-k", cmd_bound_k, "certified basic-estimate constant K"),
        ("bound-m", cmd_bound_m, "certified derivative bound M"),
    ):
        sp = add(name, handler, text)
        interval(sp)
        depth(sp)
    sp = add("monotone", cmd_monotone, "monotonicity certificate from p' >= C > 0")
    interval(sp)
    sp.add_argument("--c", required=True, help="positive lower bound on p'")
    depth(sp)
    sp = add("integrate", cmd_integrate, "exact integral of a polynomial")
    interval(sp)
    sp = add("enclose", cmd_enclose, "certified midpoint-rule enclosure of an integral")
    interval(sp)
    sp.add_argument("--n", type=int, default=100, help="number of panels")
    sp.add_argument("--lipschitz", type=float, default=None, help="Lipschitz constant (automatic for polynomials)")
    depth(sp)
    sp = add("verify-uld", cmd_verify_uld, "grid check of uniform Lipschitz differentiability")
    interval(sp)
    sp.add_argument("--grid", type=int, default=200)
    sp.add_argument("--k", type=float, default=None, help="count violations of this K")
    sp = add("verify-m", cmd_verify_m, "grid check of m-differentiability")
    interval(sp)
    sp.add_argument("--modulus", default="lipschitz")
    sp.add_argument("--grid", type=int, default=200)
    sp.add_argument("--k", type=float, default=None)
    sp = add("verify-quotient", cmd_verify_quotient, "grid check of difference-quotient continuity")
    interval(sp)
    sp.add_argument("--modulus", default="lipschitz")
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--k", type=float, default=None, help="default: empirical m-differentiability K")
    sp = add("modulus-fit", cmd_modulus_fit, "concave majorant of h,g samples from CSV", expr=False)
    sp.add_argument("csv")
    sp = add("multivar-verify", cmd_multivar_verify, "two-variable differentiability and 6K gradient check")
    sp.add_argument("--box", nargs=4, metavar=("A", "B", "C", "D"), required=True)
    sp.add_argument("--modulus", default="lipschitz")
    sp.add_argument("--grid", type=int, default=40)
    sp.add_argument("--dirs", type=int, default=16)
    sp.add_argument("--mags", type=int, default=8)
    sp.add_argument("--k", type=float, default=None)
    for name, handler, text in (
        ("greens-loop", cmd_greens_loop, "loop residual of the two edge paths around a rectangle"),
        ("mixed-partials", cmd_mixed_partials, "integral of f_xy - f_yx over a rectangle"),
    ):
        sp = add(name, handler, text)
        sp.add_argument("--rect", nargs=4, metavar=("A", "B", "C", "D"), required=True)
        sp.add_argument("--n", type=int, default=200)
    sp = add("power-sum", cmd_power_sum, "1^k + ... + n^k", expr=False)
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    return parser


def run(argv: Sequence[str]) -> tuple[CommandResult, bool]:
    """Execute a command line; returns the result and whether --json was given."""
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(list(argv))
        return args.handler(args), args.json
    except SystemExit as exc:  # --help
        return CommandResult("", code=EXIT_OK if not exc.code else EXIT_USAGE), as_json
    except (UsageError, LimitlessError, ValueError, TypeError, ZeroDivisionError, OSError) as exc:
        return CommandResult(f"error: {exc}", {"error": str(exc)}, EXIT_USAGE), as_json


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    result, as_json = run(argv)
    out = result.render(as_json)
    stream = sys.stderr if result.code == EXIT_USAGE else sys.stdout
    if out:
        print(out, file=stream)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
