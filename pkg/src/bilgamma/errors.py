"""Exception types raised by the library.

Every numerical routine either returns a finite float or raises one of
these; NaNs are never propagated silently.
"""


class BilgammaError(Exception):
    """Base class for all library errors."""


class DomainError(BilgammaError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """The density was requested at x = 0 where it diverges (alpha+ + alpha- <= 1)."""


class ContractViolationError(BilgammaError, ValueError):
    """A precondition tying several arguments together was violated
    (e.g. a closed form was requested for parameters it does not cover)."""


class EvaluationError(BilgammaError, ArithmeticError):
    """A series or quadrature failed to converge to the requested tolerance.

    Carries whatever partial result is available for diagnostics.
    """

    def __init__(self, message, partial=None, detail=None):
        super().__init__(message)
        self.partial = partial
        self.detail = detail


class FitError(BilgammaError, RuntimeError):
    """Degenerate data or setup makes fitting impossible."""


class OracleError(BilgammaError, RuntimeError):
    """A brute-force oracle failed; this signals broken test infrastructure,
    not a defect in the product code paths."""


class DataError(BilgammaError, ValueError):
    """Malformed input data (CLI file parsing)."""
