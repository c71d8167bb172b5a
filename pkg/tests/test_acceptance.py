"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""

import itertools
import json
import random
import time
from fractions import Fraction


from limitless import numeric
from limitless.certify import (
    Interval,
    basic_estimate_constant,
    derivative_bound,
    monotonicity_certificate,
    validate_certificate,
)
from limitless.cli import main
from limitless.errors import DerivativeLowerBoundNotCertified
from limitless.moduli import Hoelder, Lipschitz, concave_majorant
from limitless.multivar import (
    LOOP_SLACK,
    VectorFunction2,
    greens_loop_residual,
    mixed_partials_check,
    verify_gradient_continuity,
    verify_multivar_differentiable,
)
from limitless.quad import ENCLOSURE_SLACK, integrate_poly, riemann_enclosure, riemann_power_curve
from limitless.ratpoly import (
    BivariatePolynomial,
    Polynomial,
    compose,
    derivative,
    divided_difference,
    tangent_remainder,
)
from limitless.uldcheck import (
    derivative_lipschitz_check,
    refinement_study,
    verify_quotient_continuity,
    verify_uld,
)


def random_rational(rng, bound=100, max_den=100):
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def random_poly(rng, max_degree=10, bound=100):
    return Polynomial(tuple(random_rational(rng, bound) for _ in range(rng.randint(0, max_degree) + 1)))


def test_c01_exact_division_identities(criterion):
    rng = random.Random(1)
    xa = BivariatePolynomial.x_minus_a()
    start = time.perf_counter()
    failures = 0
    for _ in range(500):
        p = random_poly(rng)
        px, pa = BivariatePolynomial.from_x(p), BivariatePolynomial.from_a(p)
        q, r = divided_difference(p), tangent_remainder(p)
        failures += xa * q + pa != px
        failures += xa * xa * r + pa + BivariatePolynomial.from_a(derivative(p)) * xa != px
    elapsed = time.perf_counter() - start
    criterion(1, "exact q and r reconstruction, 500 polynomials", failures == 0 and elapsed < 5,
              f"failures={failures}, {elapsed:.2f}s")


def test_c02_differentiation_rules(criterion):
    rng = random.Random(2)
    bad = 0
    for _ in range(100):
        p, g = random_poly(rng, 6), random_poly(rng, 6)
        alpha, beta = random_rational(rng), random_rational(rng)
        bad += derivative(p * alpha + g * beta) != derivative(p) * alpha + derivative(g) * beta
        bad += derivative(p * g) != derivative(p) * g + p * derivative(g)
        h = random_poly(rng, 3)
        bad += derivative(compose(p, h)) != compose(derivative(p), h) * derivative(h)
    for n in range(0, 51):
        expected = Polynomial.monomial(n - 1, n) if n else Polynomial()
        bad += derivative(Polynomial.monomial(n)) != expected
    criterion(2, "linearity, Leibniz, chain, power rule n<=50", bad == 0, f"failures={bad}")


def rational_pairs(rng, count, lo=-2, hi=2, max_den=97):
    out = []
    for _ in range(count):
        pair = []
        for _ in range(2):
            den = rng.randint(1, max_den)
            pair.append(Fraction(rng.randint(lo * den, hi * den), den))
        out.append(tuple(pair))
    return out


def test_c03_basic_estimate(criterion):
    rng = random.Random(3)
    domain = Interval(-2, 2)
    failures, checked = 0, 0
    for _ in range(10):
        p = random_poly(rng, 6, 10)
        K = basic_estimate_constant(p, domain, 4).value
        dp = derivative(p)
        for x, a in rational_pairs(rng, 1000):
            checked += 1
            failures += abs(p(x) - p(a) - dp(a) * (x - a)) > K * (x - a) ** 2
    criterion(3, "basic estimate with certified K, 10^4 rational pairs", failures == 0 and checked == 10**4,
              f"failures={failures}/{checked}")


def test_c04_K_soundness_and_tightness(criterion):
    cube = Polynomial.monomial(3)
    pts = [Fraction(i, 99) for i in range(100)]
    oracle = max(abs(x + 2 * a) for x in pts for a in pts)
    values = [basic_estimate_constant(cube, Interval(0, 1), d).value for d in range(0, 9)]
    in_range = all(oracle <= v <= Fraction(7, 2) for v in values[3:])
    monotone = all(b <= a for a, b in zip(values, values[1:]))
    criterion(4, "K for x^3 on [0,1] in [3, 3.5] at depth>=3, non-increasing", oracle == 3 and in_range and monotone,
              f"K(3..8)={[float(v) for v in values[3:]]}")


def test_c05_monotonicity_certificate(criterion):
    cert = monotonicity_certificate(Polynomial.monomial(3), Interval(1, 2), 3)
    validate_certificate(cert)
    t, v = cert.partition, cert.values
    steps_ok = all(b - a <= 3 / cert.K.value for a, b in zip(t, t[1:]))
    values_ok = all(a <= b for a, b in zip(v, v[1:]))
    try:
        monotonicity_certificate(Polynomial.monomial(2), Interval(-1, 1), 1)
        rejected = False
    except DerivativeLowerBoundNotCertified:
        rejected = True
    criterion(5, "certificate for x^3 on [1,2]; x^2 on [-1,1] not certified", steps_ok and values_ok and rejected,
              f"K={cert.K.value}, partition={[str(s) for s in t]}")


def test_c06_bounded_change(criterion):
    rng = random.Random(6)
    domain = Interval(-2, 2)
    failures, checked = 0, 0
    for _ in range(10):
        p = random_poly(rng, 6, 10)
        M = derivative_bound(p, domain, 4).value
        for x, a in rational_pairs(rng, 1000):
            checked += 1
            failures += abs(p(x) - p(a)) > M * abs(x - a)
    criterion(6, "rule of bounded change with certified M, 10^4 pairs", failures == 0 and checked == 10**4,
              f"failures={failures}/{checked}")


def test_c07_uld_implies_lipschitz_derivative(criterion):
    details, ok = [], True
    for coeffs, name in (((0, 0, 1), "x^2"), ((0, 0, 0, 1), "x^3"), ((0, -1, 0, 0, 1), "x^4-x")):
        f = numeric.polynomial(Polynomial(coeffs))
        K = verify_uld(f, (-1, 1), 200).empirical_constant
        v = derivative_lipschitz_check(f, K, Lipschitz(1), (-1, 1), 200).violations
        ok &= v == 0
        details.append(f"{name}: K={K:.4g} violations={v}")
    criterion(7, "verify_uld K gives zero violations at 2K on grid 200", ok, "; ".join(details))


def test_c08_hoelder_and_divergence(criterion):
    f = numeric.power(1.5)
    hoel = refinement_study(f, (0, 1), (100, 200, 400), Hoelder(1, 0.5))
    K = hoel.constants[-1]
    v = verify_quotient_continuity(f, K, Hoelder(1, 0.5), (0, 1), 64).violations
    uld = refinement_study(f, (0, 1), (100, 400))
    growth = uld.constants[1] / uld.constants[0]
    ok = hoel.stable(0.10) and v == 0 and growth >= 1.5
    criterion(8, "x^(3/2): Hoelder K stable, quotient check clean, ULD K diverges", ok,
              f"Hoelder K={[round(c, 5) for c in hoel.constants]}, violations={v}, ULD growth x{growth:.3f}")


def brute_force_minimal(samples, m):
    """Least concave majorant values at the sample abscissae by enumerating chords."""
    pts = sorted(set(samples) | {(0.0, 0.0)})
    mono, run = [], Fraction(0)
    for h, g in pts:
        run = max(run, Fraction(g))
        mono.append((Fraction(h), run))
    vertices = {Fraction(h) for h, _ in m.vertices}
    for h, _ in mono:
        best = max(
            g1 if h1 == h2 else g1 + (g2 - g1) * (h - h1) / (h2 - h1)
            for (h1, g1), (h2, g2) in itertools.product(mono, mono)
            if h1 <= h <= h2
        )
        got = m(float(h))
        if h in vertices and Fraction(got) != best:
            return False
        if abs(got - float(best)) > 1e-12 * (1 + float(best)):
            return False
    return True


def test_c09_modulus_pipeline(criterion):
    rng = random.Random(9)
    bad, brute = 0, 0
    for _ in range(200):
        size = rng.randint(1, 16)
        hs = rng.sample(range(1, 200), size)
        samples = [(h / 16, rng.randint(0, 64) / 32) for h in hs]
        m = concave_majorant(samples)
        v = m.vertices
        slopes = [(Fraction(b[1]) - Fraction(a[1])) / (Fraction(b[0]) - Fraction(a[0])) for a, b in zip(v, v[1:])]
        ok = v[0] == (0.0, 0.0) and all(s >= 0 for s in slopes)
        ok &= all(s2 < s1 for s1, s2 in zip(slopes, slopes[1:]))
        ok &= all(m(h) >= g for h, g in samples)
        ok &= {(h, g) for h, g in v} - {(0.0, 0.0)} <= {(h, max(g2 for h2, g2 in samples if h2 <= h)) for h, _ in samples}
        if size <= 8:
            brute += 1
            ok &= brute_force_minimal(samples, m)
        bad += not ok
    criterion(9, "concave majorant invariants on 200 sets, brute-force minimality", bad == 0 and brute > 0,
              f"failures={bad}, brute-force sets={brute}")


def test_c10_integration(criterion):
    rng = random.Random(10)
    start = time.perf_counter()
    misses, width_errors = 0, 0
    for _ in range(100):
        p = random_poly(rng, 6, 5)
        a = Fraction(rng.randint(-20, 0), 10)
        b = a + Fraction(rng.randint(1, 30), 10)
        n = rng.randint(1, 400)
        L = float(derivative_bound(p, Interval(a, b), 3).value)
        e = riemann_enclosure(numeric.polynomial(p), L, float(a), float(b), n)
        misses += not e.contains(float(integrate_poly(p, a, b)))
        law = L * float(b - a) ** 2 / n
        slack = 2 * ENCLOSURE_SLACK * (abs(e.midpoint_sum) + 1)
        width_errors += not (law <= e.width + 1e-12 * law and e.width <= law + slack + 1e-12 * (law + 1))
    curve_ok = all(
        abs(riemann_power_curve(n, k) - 1 / (k + 1)) <= k / n for k in range(0, 6) for n in (10, 100, 1000)
    )
    sample = riemann_power_curve(100, 2)
    elapsed = time.perf_counter() - start
    ok = misses == 0 and width_errors == 0 and curve_ok and abs(sample - 0.33835) < 1e-12 and elapsed < 5
    criterion(10, "enclosures contain exact integrals, width law, power curves", ok,
              f"misses={misses}, width errors={width_errors}, k=2 n=100 -> {sample:.5f}, {elapsed:.2f}s")


def vf(f, gx, gy, fxy=None, fyx=None):
    return VectorFunction2(f, lambda x, y: (gx(x, y), gy(x, y)), fxy, fyx)


def test_c11_multivar_six_K(criterion):
    box = ((-1, 1), (-1, 1))
    cases = {
        "x^2+y^2": vf(lambda x, y: x * x + y * y, lambda x, y: 2 * x, lambda x, y: 2 * y),
        "xy": vf(lambda x, y: x * y, lambda x, y: y, lambda x, y: x),
        "x^3+y^3": vf(lambda x, y: x**3 + y**3, lambda x, y: 3 * x**2, lambda x, y: 3 * y**2),
    }
    details, ok = [], True
    for name, F in cases.items():
        K = verify_multivar_differentiable(F, Lipschitz(1), box, 40, 16, 8).empirical_constant
        v = verify_gradient_continuity(F, K, Lipschitz(1), box, 40).violations
        ok &= v == 0
        details.append(f"{name}: K={K:.4g} violations={v}")
    criterion(11, "multivar K gives zero gradient violations at 6K", ok, "; ".join(details))


def test_c12_greens_loop(criterion):
    unit = (0, 1, 0, 1)
    xy = vf(lambda x, y: x * y, lambda x, y: y, lambda x, y: x, lambda x, y: 1 + 0 * x, lambda x, y: 1 + 0 * x)
    x2y3 = vf(
        lambda x, y: x**2 * y**3,
        lambda x, y: 2 * x * y**3,
        lambda x, y: 3 * x**2 * y**2,
        lambda x, y: 6 * x * y**2,
        lambda x, y: 6 * x * y**2,
    )
    odd = vf(
        lambda x, y: x**3 * y - x * y**3,
        lambda x, y: 3 * x**2 * y - y**3,
        lambda x, y: x**3 - 3 * x * y**2,
        lambda x, y: 3 * x**2 - 3 * y**2,
        lambda x, y: 3 * x**2 - 3 * y**2,
    )
    r_xy = greens_loop_residual(xy, unit, 200)
    r100, r200 = greens_loop_residual(x2y3, unit, 100), greens_loop_residual(x2y3, unit, 200)
    checks = [mixed_partials_check(F, unit, 200) for F in (xy, x2y3, odd)]
    ok = abs(r_xy) <= LOOP_SLACK and abs(r200) <= 1e-4 and 3.5 <= r100 / r200 <= 4.5
    ok &= all(c.passed for c in checks)
    criterion(12, "loop residuals and mixed partials", ok,
              f"R_xy={r_xy:.3g}, R(200)={r200:.3g}, ratio={r100 / r200:.4f}, "
              f"mixed={[f'{c.value:.2g}<={c.tolerance:.2g}' for c in checks]}")


def test_c13_cli(criterion, tmp_path, capsys):
    code = main(["diff", "x^4"])
    answer = capsys.readouterr().out.strip()
    csv = tmp_path / "s.csv"
    csv.write_text("h,g\n0.5,0.4\n1,1\n")
    corpus = [
        (["factor-q", "x^4"], 0),
        (["factor-r", "x^3"], 0),
        (["bound-k", "x^3", "--interval", "0", "1", "--depth", "6"], 0),
        (["bound-m", "x^2", "--interval", "0", "1"], 0),
        (["monotone", "x^3", "--interval", "1", "2", "--c", "3"], 0),
        (["integrate", "x^2", "--interval", "0", "1"], 0),
        (["enclose", "x^2", "--interval", "0", "1", "--n", "10"], 0),
        (["verify-uld", "x^3", "--interval", "0", "1", "--grid", "50"], 0),
        (["verify-m", "x^(3/2)", "--interval", "0", "1", "--modulus", "hoelder:1:1/2", "--grid", "50"], 0),
        (["verify-quotient", "x^2", "--interval", "0", "1", "--grid", "20"], 0),
        (["modulus-fit", str(csv)], 0),
        (["multivar-verify", "x*y", "--box", "-1", "1", "-1", "1", "--grid", "10"], 0),
        (["greens-loop", "x*y", "--rect", "0", "1", "0", "1"], 0),
        (["mixed-partials", "x^2*y^3", "--rect", "0", "1", "0", "1"], 0),
        (["power-sum", "10", "1"], 0),
        (["monotone", "x^2", "--interval", "-1", "1", "--c", "1"], 1),
        (["verify-uld", "x^3", "--interval", "0", "1", "--grid", "50", "--k", "1"], 1),
        (["diff", "x^-1"], 2),
        (["diff", "x +"], 2),
        (["bound-k", "x^3", "--interval", "1", "0"], 2),
        (["monotone", "x^3", "--interval", "1", "2", "--c", "0"], 2),
        (["enclose", "x", "--interval", "0", "1", "--lipschitz", "-1"], 2),
        (["verify-uld", "sqrt(x)", "--interval", "-1", "1"], 2),
        (["modulus-fit", str(tmp_path / "missing.csv")], 2),
        (["power-sum", "x", "1"], 2),
        (["no-such-command"], 2),
    ]
    wrong = []
    for argv, expected in corpus:
        got = main(argv)
        capsys.readouterr()
        if got != expected:
            wrong.append(f"{' '.join(argv)} -> {got}")
        elif expected != 2:
            main(["--json", *argv])
            json.loads(capsys.readouterr().out)  # payload must be valid JSON
    ok = code == 0 and answer == "4*x^3" and not wrong
    criterion(13, "CLI diff x^4 and exit-code corpus", ok, f"diff -> {answer!r}; mismatches={wrong}")
