"""Evaluation policy: tolerances and method switches shared by the kernels."""

import os
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class EvalPolicy:
    """Tolerances controlling series and quadrature evaluation.

    rel_tol             relative tolerance for series termination and
                        quadrature targets
    max_terms           cap on series terms before giving up
    quad_abs_tol        absolute tolerance for adaptive quadrature
    asymptotic_switch_z Whittaker argument above which the large-argument
                        series replaces the integral representation
    """

    rel_tol: float = 1e-10
    max_terms: int = 400
    quad_abs_tol: float = 1e-12
    asymptotic_switch_z: float = 50.0
    max_depth: int = 60

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-3):
            raise DomainError(f"rel_tol must be in (0, 1e-3), got {self.rel_tol}")
        if self.max_terms < 100:
            raise DomainError(f"max_terms must be >= 100, got {self.max_terms}")
        if not self.quad_abs_tol > 0.0:
            raise DomainError("quad_abs_tol must be positive")
        if not self.asymptotic_switch_z > 0.0:
            raise DomainError("asymptotic_switch_z must be positive")


def policy_from_env():
    """Default policy, with BILGAMMA_* environment overrides.

    Recognized: BILGAMMA_REL_TOL, BILGAMMA_MAX_TERMS, BILGAMMA_QUAD_ABS_TOL,
    BILGAMMA_ASYM_SWITCH_Z.
    """
    kw = {}
    v = os.environ.get("BILGAMMA_REL_TOL")
    if v:
        kw["rel_tol"] = float(v)
    v = os.environ.get("BILGAMMA_MAX_TERMS")
    if v:
        kw["max_terms"] = int(v)
    v = os.environ.get("BILGAMMA_QUAD_ABS_TOL")
    if v:
        kw["quad_abs_tol"] = float(v)
    v = os.environ.get("BILGAMMA_ASYM_SWITCH_Z")
    if v:
        kw["asymptotic_switch_z"] = float(v)
    return EvalPolicy(**kw)


DEFAULT_POLICY = policy_from_env()
