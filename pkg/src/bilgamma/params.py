"""Parameter tuple of the bilateral Gamma family."""

import math
from dataclasses import dataclass

from .errors import DomainError

# absolute tolerance for "is an integer" tests on shape parameters
INT_TOL = 1e-12


@dataclass(frozen=True)
class BgParams:
    """The four positive parameters (alpha+, lambda+, alpha-, lambda-).

    alpha_plus / alpha_minus are dimensionless shapes, lambda_plus /
    lambda_minus are rates (inverse x-units) of the positive and negative
    Gamma components of X - Y.  Immutable, hence safe to share across
    threads.
    """

    alpha_plus: float
    lambda_plus: float
    alpha_minus: float
    lambda_minus: float

    def __post_init__(self):
        for name in ("alpha_plus", "lambda_plus", "alpha_minus", "lambda_minus"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a finite positive number, got {v!r}")
            object.__setattr__(self, name, float(v))

    def swapped(self):
        """Parameter roles exchanged; pdf(p, x) == pdf(p.swapped(), -x)."""
        return BgParams(self.alpha_minus, self.lambda_minus,
                        self.alpha_plus, self.lambda_plus)

    @property
    def alpha_sum(self):
        return self.alpha_plus + self.alpha_minus

    def astuple(self):
        return (self.alpha_plus, self.lambda_plus,
                self.alpha_minus, self.lambda_minus)


def is_near_integer(x, tol=INT_TOL):
    return abs(x - round(x)) <= tol and round(x) >= 1


def as_params(obj):
    """Coerce a BgParams or a length-4 iterable into BgParams."""
    if isinstance(obj, BgParams):
        return obj
    vals = tuple(obj)
    if len(vals) != 4:
        raise DomainError(f"expected 4 parameters, got {len(vals)}")
    return BgParams(*vals)
