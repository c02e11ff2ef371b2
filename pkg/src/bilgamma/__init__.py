"""bilgamma: the four-parameter bilateral Gamma distribution family.

Densities through several closed-form representations, distribution-level
structure (characteristic function, Levy measure, moments, CDF/quantile),
shape analysis (smoothness, mode, asymptotics), exact sampling and
maximum-likelihood fitting, all validated against independent brute-force
oracles.
"""

from ._backend import HAS_NUMBA, USE_NUMBA
from .analysis import (ModeResult, NearZeroClass, NearZeroTag, ShapeReport,
                       Taxonomy, integro_diff_residual, log_tail_slopes, mode,
                       near_zero_class, shape_report, smoothness_class,
                       tail_constants)
from .density import (DensityBranch, f_prime_at_zero, log_pdf, pdf,
                      pdf_derivative, pdf_equal_alpha, pdf_integer_shape,
                      pdf_via_branch, select_branch)
from .distribution import (MomentSet, VgParams, cdf, char_fn, convolve, k_fn,
                           levy_density, moments, quantile, scale, vg_params,
                           vg_pdf)
from .errors import (BilgammaError, ContractViolationError, DataError,
                     DomainError, EvaluationError, FitError, OracleError,
                     PoleError)
from .params import BgParams, as_params
from .policy import DEFAULT_POLICY, EvalPolicy
from .simfit import (FitResult, RngState, batch_log_pdf, fit_mle,
                     gamma_variate, loglik, moment_match_init, sample)
from .specfun import (EULER_GAMMA, bessel_k, exp_integral_e1, kummer_phi,
                      ln_gamma, reg_lower_incomplete_gamma, whittaker_w,
                      whittaker_w_via_m)

__version__ = "0.1.0"

__all__ = [
    "BgParams", "EvalPolicy", "DEFAULT_POLICY", "as_params",
    "HAS_NUMBA", "USE_NUMBA",
    # specfun
    "EULER_GAMMA", "ln_gamma", "reg_lower_incomplete_gamma",
    "exp_integral_e1", "kummer_phi", "whittaker_w", "whittaker_w_via_m",
    "bessel_k",
    # density
    "DensityBranch", "select_branch", "pdf", "log_pdf", "pdf_integer_shape",
    "pdf_equal_alpha", "pdf_derivative", "f_prime_at_zero", "pdf_via_branch",
    # distribution
    "MomentSet", "VgParams", "char_fn", "levy_density", "k_fn", "moments",
    "scale", "convolve", "cdf", "quantile", "vg_params", "vg_pdf",
    # analysis
    "ModeResult", "NearZeroClass", "NearZeroTag", "ShapeReport", "Taxonomy",
    "smoothness_class", "mode", "near_zero_class", "tail_constants",
    "log_tail_slopes", "shape_report", "integro_diff_residual",
    # simfit
    "RngState", "FitResult", "gamma_variate", "sample", "loglik",
    "batch_log_pdf", "moment_match_init", "fit_mle",
    # errors
    "BilgammaError", "DomainError", "PoleError", "ContractViolationError",
    "EvaluationError", "FitError", "OracleError", "DataError",
]
