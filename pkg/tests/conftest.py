from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import settings

from limitless.ratpoly import Polynomial

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=100)


def polynomials(max_degree=10):
    return st.lists(rationals, max_size=max_degree + 1).map(lambda cs: Polynomial(tuple(cs)))


@pytest.fixture
def x():
    return Polynomial.x()


def P(*coeffs):
    """Polynomial from ascending coefficients."""
    return Polynomial(tuple(Fraction(c) for c in coeffs))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
