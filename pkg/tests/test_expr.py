from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import P
from limitless.errors import EvaluationFailure, NonPolynomial, ParseError
from limitless.expr import (
    differentiate,
    is_polynomial,
    parse,
    to_bivariate,
    to_function,
    to_function2,
    to_polynomial,
    to_text,
)
from limitless.ratpoly import BivariatePolynomial, divided_difference

X, Y = sympy.symbols("x y")


def test_polynomial_examples():
    assert to_polynomial("x^2 + 3*x - 1/2") == P(Fraction(-1, 2), 3, 1)
    assert to_polynomial("(x-1)^3") == P(-1, 3, -3, 1)
    assert to_polynomial("0.25*x") == P(0, Fraction(1, 4))
    assert to_polynomial("(x+1)/2") == P(Fraction(1, 2), Fraction(1, 2))
    assert to_polynomial("2^10") == P(1024)


@pytest.mark.parametrize("src", ["x^-1", "sqrt(x)", "x^(1/2)", "1/x", "x^x", "abs(x)", "x^(0-2)"])
def test_non_polynomial(src):
    with pytest.raises(NonPolynomial):
        to_polynomial(src)
    assert not is_polynomial(parse(src))


def test_power_binds_tighter_than_negation():
    assert to_polynomial("-x^2") == P(0, 0, -1)
    assert to_polynomial("2^3^2") == P(512)
    assert to_polynomial("(-x)^2") == P(0, 0, 1)


@pytest.mark.parametrize(
    "src, column",
    [
        ("", 0),
        ("x +", 3),
        ("(x", 2),
        ("x)", 1),
        ("2 $ x", 2),
        ("foo(x)", 0),
        ("z + 1", 0),
        ("sqrt x", 0),
        ("pow(x)", 0),
        ("x 2", 2),
        ("sin(x,", 6),
    ],
)
def test_parse_errors_carry_position(src, column):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.position == column
    assert f"column {column}" in str(info.value)


def test_variables_are_context_dependent():
    assert to_bivariate("x + 2*a") == BivariatePolynomial(((0, 2), (1,)))
    with pytest.raises(ParseError):
        parse("x*y")
    parse("x*y", ("x", "y"))


names = st.sampled_from(["x"])
leaves = st.one_of(
    names,
    st.integers(0, 9).map(str),
    st.fractions(0, 5, max_denominator=4).map(lambda f: f"{f.numerator}/{f.denominator}"),
)


def combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
        children.map(lambda c: f"-({c})"),
        st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "abs"]), children).map(lambda t: f"{t[0]}({t[1]})"),
    )


expressions = st.recursive(leaves, combine, max_leaves=8)


@given(expressions)
def test_print_parse_fixpoint(src):
    e = parse(src)
    text = to_text(e)
    assert to_text(parse(text)) == text


@given(expressions)
def test_printed_form_preserves_value(src):
    e = parse(src)
    xs = np.linspace(-1.5, 1.5, 7)
    f, g = to_function(e), to_function(to_text(e))
    np.testing.assert_allclose(f.values(xs), g.values(xs), rtol=1e-12, atol=1e-12)


polynomial_sources = st.recursive(
    st.one_of(st.just("x"), st.integers(-5, 5).map(lambda k: f"({k})")),
    lambda c: st.one_of(
        st.tuples(c, st.sampled_from(["+", "-", "*"]), c).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
        st.tuples(c, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
    ),
    max_leaves=8,
)


@given(polynomial_sources)
def test_polynomial_lowering_matches_sympy(src):
    p = to_polynomial(src)
    expected = sympy.Poly(sympy.sympify(src.replace("^", "**")), X).all_coeffs()[::-1]
    coeffs = [Fraction(int(c.p), int(c.q)) for c in expected]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    assert list(p.coeffs) == coeffs


@given(expressions)
def test_symbolic_derivative_matches_sympy(src):
    e = parse(src)
    d = differentiate(e)
    xr = sympy.Symbol("x", real=True)
    oracle = sympy.diff(sympy.sympify(src.replace("^", "**"), locals={"x": xr}), xr)
    fn = sympy.lambdify(xr, oracle, modules="numpy")
    for t in (-1.3, -0.4, 0.35, 1.1):
        want = float(fn(t))
        got = to_function(d)(t)
        assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


def test_derivative_text():
    assert to_text(differentiate(parse("x^4"))) == "4*x^3"
    assert to_text(differentiate(parse("3*x + 2"))) == "3"
    assert to_text(differentiate(parse("sin(x)"))) == "cos(x)"


def test_numeric_lowering_guards_domains():
    f = to_function("sqrt(x)")
    assert f(4.0) == 2.0
    assert f.derivative_at(4.0) == pytest.approx(0.25)
    with pytest.raises(EvaluationFailure):
        f(-1.0)
    with pytest.raises(EvaluationFailure):
        to_function("1/x")(0.0)
    assert to_function("x^(3/2)")(4.0) == pytest.approx(8.0)


def test_polynomial_function_is_exact_backed():
    f = to_function("x^3 - x")
    assert f.polynomial == P(0, -1, 0, 1)
    assert f(2.0) == 6.0


def test_function2_partials():
    G = to_function2("x^2*y^3")
    gx, gy = G.gradient(np.array([0.5]), np.array([2.0]))
    assert gx[0] == pytest.approx(8.0) and gy[0] == pytest.approx(3.0)
    assert G.f_xy(1.0, 1.0) == pytest.approx(6.0) == G.f_yx(1.0, 1.0)


def test_outputs_reparse_into_identities():
    p = to_polynomial("x^5 - 2*x + 7/3")
    q = divided_difference(p)
    assert to_bivariate(q.to_text()) == q
    assert to_polynomial(p.to_text()) == p
