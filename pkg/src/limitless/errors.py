"""Exception hierarchy shared by all limitless modules."""


class LimitlessError(Exception):
    """Base class for every error raised by this package."""


class DerivativeLowerBoundNotCertified(LimitlessError):
    """Interval evaluation could not show p' >= C on the whole domain.

    This is "not certified", never "false": interval enclosures overestimate,
    so a larger depth may still succeed when the claim is true.
    """

    def __init__(self, message, subinterval=None, enclosure=None):
        super().__init__(message)
        self.subinterval = subinterval
        self.enclosure = enclosure


class InvalidC(LimitlessError, ValueError):
    pass


class NegativeArgument(LimitlessError, ValueError):
    pass


class NegativeSample(LimitlessError, ValueError):
    pass


class InvalidModulus(LimitlessError, ValueError):
    pass


class EvaluationFailure(LimitlessError, ArithmeticError):
    """A numeric function is undefined (or non-finite) at a requested point."""


class MissingDerivative(LimitlessError):
    pass


class MissingGradient(LimitlessError):
    pass


class InvalidInterval(LimitlessError, ValueError):
    pass


class NegativeL(LimitlessError, ValueError):
    pass


class InvalidRectangle(LimitlessError, ValueError):
    pass


class ParseError(LimitlessError, ValueError):
    """Malformed expression text. ``position`` is a 0-based column."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at column {position})"
        super().__init__(message)
        self.position = position


class NonPolynomial(LimitlessError, ValueError):
    """The expression cannot be lowered to an exact polynomial."""
