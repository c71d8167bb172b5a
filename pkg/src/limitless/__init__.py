"""Calculus without limits.

Exact differentiation of polynomials by division, interval-certified
basic-estimate constants and monotonicity certificates, moduli of continuity,
grid verification of uniform differentiability, and certified integration.
"""

import json
from importlib import resources

from .certify import (
    CertifiedBound,
    Interval,
    MonotonicityCertificate,
    basic_estimate_constant,
    derivative_bound,
    interval_eval,
    monotonicity_certificate,
    validate_certificate,
)
from .errors import (
    DerivativeLowerBoundNotCertified,
    EvaluationFailure,
    InvalidC,
    LimitlessError,
    MissingDerivative,
    MissingGradient,
    NonPolynomial,
    ParseError,
)
from .expr import parse, to_function, to_function2, to_polynomial, to_text
from .moduli import Hoelder, Lipschitz, PiecewiseLinearConcave, SampleSet, concave_majorant, empirical_oscillation
from .numeric import NumericFunction
from .quad import antiderivative, integrate_poly, power_sum, riemann_enclosure, riemann_power_curve
from .ratpoly import (
    BivariatePolynomial,
    Polynomial,
    Rational,
    compose,
    derivative,
    divided_difference,
    eval2,
    eval_poly,
    tangent_remainder,
)

__version__ = "0.1.0"

__all__ = [
    "BivariatePolynomial",
    "CertifiedBound",
    "DerivativeLowerBoundNotCertified",
    "EvaluationFailure",
    "Hoelder",
    "Interval",
    "InvalidC",
    "LimitlessError",
    "Lipschitz",
    "MissingDerivative",
    "MissingGradient",
    "MonotonicityCertificate",
    "NonPolynomial",
    "NumericFunction",
    "ParseError",
    "PiecewiseLinearConcave",
    "Polynomial",
    "Rational",
    "SCHEMAS",
    "SampleSet",
    "antiderivative",
    "basic_estimate_constant",
    "compose",
    "concave_majorant",
    "derivative",
    "derivative_bound",
    "divided_difference",
    "empirical_oscillation",
    "eval2",
    "eval_poly",
    "integrate_poly",
    "interval_eval",
    "load_schema",
    "monotonicity_certificate",
    "parse",
    "power_sum",
    "riemann_enclosure",
    "riemann_power_curve",
    "tangent_remainder",
    "to_function",
    "to_function2",
    "to_polynomial",
    "to_text",
    "validate_certificate",
]

SCHEMAS = ("certified_bound", "monotonicity_certificate", "verification_report", "integral_enclosure", "modulus")


def load_schema(name: str) -> dict:
    """JSON Schema for one of the payloads listed in ``SCHEMAS``."""
    if name not in SCHEMAS:
        raise KeyError(f"no schema named {name!r}")
    return json.loads(resources.files(__name__).joinpath("schemas", f"{name}.json").read_text())
