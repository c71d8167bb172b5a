"""Expression front end: tokenizer, precedence-climbing parser, printer, lowering.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?          # right associative; -x^2 = -(x^2)
    atom   := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Built-ins: sqrt, abs, sign, sin, cos, exp, pow(u, gamma) with constant gamma.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .errors import EvaluationFailure, NonPolynomial, ParseError
from .numeric import NumericFunction
from .numeric import polynomial as poly_function
from .ratpoly import BivariatePolynomial, Polynomial


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = Union[Num, Var, Neg, Bin, Call]

BUILTINS = {"sqrt": 1, "abs": 1, "sign": 1, "sin": 1, "cos": 1, "exp": 1, "pow": 2}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(source) and source[pos].isspace():
            pos += 1
        if pos >= len(source):
            break
        m = _TOKEN.match(source, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: Sequence[str]):
        self.tokens = _tokenize(source)
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, value, pos = self.take()
        if value != text:
            raise ParseError(f"expected {text!r}, found {value or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and value == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.take()
        if kind == "num":
            return Num(Fraction(value))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if value not in BUILTINS:
                    raise ParseError(f"unknown function {value!r}", pos)
                self.take()
                args = [self.expr()]
                while self.peek()[1] == "," and self.peek()[0] == "op":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != BUILTINS[value]:
                    raise ParseError(f"{value} takes {BUILTINS[value]} argument(s), got {len(args)}", pos)
                return Call(value, tuple(args))
            if value in BUILTINS:
                raise ParseError(f"function {value!r} needs parentheses", pos)
            if value not in self.variables:
                raise ParseError(f"unknown variable {value!r} (allowed: {', '.join(self.variables)})", pos)
            return Var(value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def parse(source: str, variables: Sequence[str] = ("x",)) -> Expr:
    """Parse ``source`` into an expression tree; raises ParseError."""
    return _Parser(source, variables).parse()


# -- printing ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM = 5


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    if isinstance(e, Num):
        if e.value < 0:
            return _PREC["neg"]
        if e.value.denominator != 1:
            return _PREC["/"]
    return _ATOM


def to_text(e: Expr) -> str:
    """Canonical text; ``to_text(parse(to_text(e)))`` reproduces it."""
    if isinstance(e, Num):
        v = e.value
        if v < 0:
            return "-" + _wrap(Num(-v), _PREC["neg"], strict=False)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _PREC["neg"], strict=False)
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_text(a) for a in e.args)})"
    p = _PREC[e.op]
    if e.op == "^":
        left = _wrap(e.left, p, strict=True)
        right = _wrap(e.right, _PREC["neg"], strict=False)
        return f"{left}^{right}"
    left = _wrap(e.left, p, strict=False)
    right = _wrap(e.right, p, strict=True)
    sep = f" {e.op} " if e.op in "+-" else e.op
    return f"{left}{sep}{right}"


def _wrap(e: Expr, prec: int, strict: bool) -> str:
    inner = _prec(e)
    text = to_text(e)
    if inner < prec or (strict and inner == prec):
        return f"({text})"
    return text


# -- exact lowering ------------------------------------------------------------

Terms = dict[tuple[int, ...], Fraction]


def _t_add(a: Terms, b: Terms, sign: int = 1) -> Terms:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + sign * v
    return {k: v for k, v in out.items() if v}


def _t_mul(a: Terms, b: Terms) -> Terms:
    out: Terms = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, Fraction(0)) + va * vb
    return {k: v for k, v in out.items() if v}


def _constant_of(t: Terms, nvars: int):
    if not t:
        return Fraction(0)
    if set(t) == {(0,) * nvars}:
        return t[(0,) * nvars]
    return None


def _terms(e: Expr, variables: tuple[str, ...]) -> Terms:
    n = len(variables)
    zero = (0,) * n
    if isinstance(e, Num):
        return {zero: e.value} if e.value else {}
    if isinstance(e, Var):
        if e.name not in variables:
            raise NonPolynomial(f"variable {e.name!r} is not one of {variables}")
        k = [0] * n
        k[variables.index(e.name)] = 1
        return {tuple(k): Fraction(1)}
    if isinstance(e, Neg):
        return {k: -v for k, v in _terms(e.arg, variables).items()}
    if isinstance(e, Call):
        raise NonPolynomial(f"built-in {e.name}() is not polynomial")
    left = _terms(e.left, variables)
    right = _terms(e.right, variables)
    if e.op == "+":
        return _t_add(left, right)
    if e.op == "-":
        return _t_add(left, right, -1)
    if e.op == "*":
        return _t_mul(left, right)
    if e.op == "/":
        c = _constant_of(right, n)
        if c is None:
            raise NonPolynomial("division by a non-constant expression")
        if c == 0:
            raise ParseError("division by zero")
        return {k: v / c for k, v in left.items()}
    # "^"
    c = _constant_of(right, n)
    if c is None or c.denominator != 1 or c < 0:
        raise NonPolynomial(f"exponent must be a non-negative integer constant, got {to_text(e.right)}")
    result: Terms = {zero: Fraction(1)}
    for _ in range(int(c)):
        result = _t_mul(result, left)
    return result


def to_polynomial(e: Union[Expr, str]) -> Polynomial:
    """Lower a polynomial expression in x to an exact Polynomial."""
    if isinstance(e, str):
        e = parse(e)
    terms = _terms(e, ("x",))
    deg = max((k[0] for k in terms), default=-1)
    coeffs = [Fraction(0)] * (deg + 1)
    for (i,), v in terms.items():
        coeffs[i] = v
    return Polynomial(tuple(coeffs))


def to_bivariate(e: Union[Expr, str], variables: tuple[str, str] = ("x", "a")) -> BivariatePolynomial:
    if isinstance(e, str):
        e = parse(e, variables)
    terms = _terms(e, tuple(variables))
    nx = max((k[0] for k in terms), default=-1) + 1
    na = max((k[1] for k in terms), default=-1) + 1
    rows = [[Fraction(0)] * na for _ in range(nx)]
    for (i, j), v in terms.items():
        rows[i][j] = v
    return BivariatePolynomial(tuple(tuple(r) for r in rows))


def is_polynomial(e: Expr, variables: Sequence[str] = ("x",)) -> bool:
    try:
        _terms(e, tuple(variables))
    except (NonPolynomial, ParseError):
        return False
    return True


# -- symbolic derivative ------------------------------------------------------

ZERO, ONE = Num(Fraction(0)), Num(Fraction(1))


def _const(e: Expr):
    """Fold a variable-free expression to a Fraction, or None."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Neg):
        v = _const(e.arg)
        return None if v is None else -v
    if isinstance(e, Bin):
        a, b = _const(e.left), _const(e.right)
        if a is None or b is None:
            return None
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return None if b == 0 else a / b
        if b.denominator == 1 and (a != 0 or b >= 0):
            return a ** int(b)
    return None


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return Bin("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if b == ZERO:
        return a
    if a == ZERO:
        return _neg(b)
    return Bin("-", a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if a == Num(Fraction(-1)):
        return _neg(b)
    if b == Num(Fraction(-1)):
        return _neg(a)
    return Bin("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if a == ZERO:
        return ZERO
    if b == ONE:
        return a
    return Bin("/", a, b)


def _pow(a: Expr, c: Fraction) -> Expr:
    if c == 0:
        return ONE
    if c == 1:
        return a
    return Bin("^", a, Num(c) if c >= 0 else Neg(Num(-c)))


def differentiate(e: Expr, var: str = "x") -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return _neg(differentiate(e.arg, var))
    if isinstance(e, Call):
        u = e.args[0]
        du = differentiate(u, var)
        if du == ZERO:
            return ZERO
        if e.name == "sqrt":
            outer = _div(ONE, _mul(Num(Fraction(2)), e))
        elif e.name == "abs":
            outer = Call("sign", (u,))
        elif e.name == "sign":
            return ZERO
        elif e.name == "sin":
            outer = Call("cos", (u,))
        elif e.name == "cos":
            outer = _neg(Call("sin", (u,)))
        elif e.name == "exp":
            outer = e
        else:  # pow
            g = _const(e.args[1])
            if g is None:
                raise ParseError("pow() exponent must be a constant")
            outer = _mul(Num(g), Call("pow", (u, Num(g - 1) if g >= 1 else Neg(Num(1 - g)))))
        return _mul(outer, du)
    du, dv = differentiate(e.left, var), differentiate(e.right, var)
    if e.op == "+":
        return _add(du, dv)
    if e.op == "-":
        return _sub(du, dv)
    if e.op == "*":
        return _add(_mul(du, e.right), _mul(e.left, dv))
    if e.op == "/":
        return _div(_sub(_mul(du, e.right), _mul(e.left, dv)), _pow(e.right, Fraction(2)))
    c = _const(e.right)
    if c is None:
        raise ParseError("exponents must be constant")
    return _mul(_mul(Num(c), _pow(e.left, c - 1)), du)


# -- numeric lowering ------------------------------------------------------------

Compiled = Callable[..., np.ndarray]


def _domain_guard(name: str, u: np.ndarray) -> None:
    if np.any(u < 0):
        raise EvaluationFailure(f"{name} of a negative number (at {np.asarray(u)[np.asarray(u) < 0].flat[0]!r})")


def _real_power(u, g: float, integer: bool):
    if not integer:
        _domain_guard("non-integer power", u)
    return np.power(u, g)


def compile_expr(e: Expr, variables: Sequence[str] = ("x",)) -> Compiled:
    """Turn ``e`` into a float64 function of the given variables (array-friendly)."""
    variables = tuple(variables)

    def build(node: Expr):
        if isinstance(node, Num):
            v = float(node.value)
            return lambda *xs: np.full(np.broadcast(*xs).shape, v) if xs else np.float64(v)
        if isinstance(node, Var):
            idx = variables.index(node.name)
            return lambda *xs: np.asarray(xs[idx], float)
        if isinstance(node, Neg):
            f = build(node.arg)
            return lambda *xs: -f(*xs)
        if isinstance(node, Call):
            f = build(node.args[0])
            name = node.name
            if name == "pow":
                g = _const(node.args[1])
                if g is None:
                    raise ParseError("pow() exponent must be a constant")
                gf, gi = float(g), g.denominator == 1
                return lambda *xs: _real_power(f(*xs), gf, gi)
            if name == "sqrt":

                def sq(*xs):
                    u = f(*xs)
                    _domain_guard("sqrt", u)
                    return np.sqrt(u)

                return sq
            fn = {"abs": np.abs, "sign": np.sign, "sin": np.sin, "cos": np.cos, "exp": np.exp}[name]
            return lambda *xs: fn(f(*xs))
        f, g = build(node.left), build(node.right)
        if node.op == "+":
            return lambda *xs: f(*xs) + g(*xs)
        if node.op == "-":
            return lambda *xs: f(*xs) - g(*xs)
        if node.op == "*":
            return lambda *xs: f(*xs) * g(*xs)
        if node.op == "/":
            return lambda *xs: f(*xs) / g(*xs)
        c = _const(node.right)
        if c is None:
            raise ParseError("exponents must be constant")
        cf, ci = float(c), c.denominator == 1
        return lambda *xs: _real_power(f(*xs), cf, ci)

    return build(e)


def to_function(e: Union[Expr, str]) -> NumericFunction:
    """NumericFunction of x with its symbolic derivative; polynomials stay exact-backed."""
    if isinstance(e, str):
        e = parse(e)
    if is_polynomial(e):
        p = to_polynomial(e)
        return poly_function(p, label=to_text(e))
    f = compile_expr(e)
    df = compile_expr(differentiate(e))
    return NumericFunction(f=f, df=df, label=to_text(e))


def to_function2(e: Union[Expr, str]):
    """VectorFunction2 of (x, y) with gradient and both mixed partials."""
    from .multivar import VectorFunction2

    if isinstance(e, str):
        e = parse(e, ("x", "y"))
    v = ("x", "y")
    ex, ey = differentiate(e, "x"), differentiate(e, "y")
    fx, fy = compile_expr(ex, v), compile_expr(ey, v)
    return VectorFunction2(
        f=compile_expr(e, v),
        grad=lambda x, y: (fx(x, y), fy(x, y)),
        f_xy=compile_expr(differentiate(ex, "y"), v),
        f_yx=compile_expr(differentiate(ey, "x"), v),
        label=to_text(e),
    )
