"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: parse errors exit 2, domain and
convergence problems exit 3, tolerance failures exit 4.
"""


class HyperExpError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HyperExpError, ValueError):
    """Malformed textual input (parameters, rationals, words)."""

    def __init__(self, message, text=None, column=None):
        if text is not None and column is not None:
            message = f"{message} at column {column} in {text!r}"
        super().__init__(message)
        self.text = text
        self.column = column


class DomainError(HyperExpError, ValueError):
    """Input outside the supported mathematical domain."""


class NonInvertibleError(DomainError):
    """Truncated epsilon series with vanishing constant term."""


class ConvergenceError(DomainError):
    """A series or quadrature did not reach the requested tolerance."""


class UnsupportedError(HyperExpError):
    """Request is well formed but outside what this package implements."""


class ReductionError(HyperExpError):
    """A contiguous step is singular at the requested parameter values."""
