"""Exception hierarchy.

Everything derives from :class:`ResolossError`. Input problems additionally
derive from :class:`ValueError` so callers that only know the builtin still
catch them; the CLI maps :class:`InputError` to exit code 1.
"""


class ResolossError(Exception):
    """Base class for all package errors."""


class InputError(ResolossError, ValueError):
    """Caller supplied data that violates a precondition."""


class InvalidTrace(InputError):
    pass


class FitError(ResolossError):
    """A fit could not produce a usable result."""


class NonPhysicalFit(FitError):
    """Fitted parameters imply non-positive internal loss or |phi| >= pi/2."""


class InsufficientWings(InputError):
    pass


class DegenerateGeometry(FitError):
    """Circle fit input is collinear (or coincident) within tolerance."""


class NoResonance(FitError):
    pass


class NotConverged(FitError):
    """Iteration limit hit before the convergence tests passed.

    The partial result, when one exists, is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SingularNormalMatrix(FitError):
    pass


class InsufficientData(InputError):
    pass


class UnidentifiableSaturation(FitError):
    """The sweep never leaves the low-power plateau, so n_c is only bounded.

    ``n_c_lower_bound`` holds the largest photon number in the sweep.
    """

    def __init__(self, message, n_c_lower_bound=None, result=None):
        super().__init__(message)
        self.n_c_lower_bound = n_c_lower_bound
        self.result = result


class Unreachable(InputError):
    """Shunt capacitance alone already exceeds the required total."""


class EmptyBand(ResolossError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GridTooNarrow(InputError):
    pass


# file parsing

class ParseError(InputError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedOptionLine(ParseError):
    pass


class UnsupportedFormat(ParseError):
    pass


class RowArityError(ParseError):
    pass


class MissingHeader(ParseError):
    pass


class NonPositiveValue(ParseError):
    pass
