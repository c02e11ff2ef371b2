"""Density of the bilateral Gamma law and its first derivative.

Four evaluation routes, dispatched cheapest-first:

* integer shape      -- polynomial-times-exponential closed form
* equal shapes       -- Bessel-K form (the Variance Gamma case)
* general            -- Whittaker-function representation
* quadrature fallback-- the defining Gamma-convolution integral, used
                        whenever the chosen route reports an evaluation
                        failure

The negative axis is always handled through the reflection
f(x; a+, l+, a-, l-) = f(-x; a-, l-, a+, l+), so only x > 0 is evaluated
directly.  All prefactors are assembled in log space and exponentiated
once, which keeps rates of order 10^2 (typical for daily-return fits)
away from overflow.
"""

import enum
import math

from . import _kernels as _k
from ._kernels import _GL_X, _GL_W
from .errors import ContractViolationError, DomainError, EvaluationError, PoleError
from .params import INT_TOL, BgParams, as_params, is_near_integer
from .policy import DEFAULT_POLICY
from .specfun import _lnw_cd, _log_bessel_k


class DensityBranch(enum.Enum):
    INTEGER_SHAPE = "IntegerShape"
    EQUAL_ALPHA_BESSEL = "EqualAlphaBessel"
    WHITTAKER_GENERAL = "WhittakerGeneral"
    QUADRATURE_FALLBACK = "QuadratureFallback"


def select_branch(params):
    """Evaluation branch used for the positive axis of ``params``.

    Integer shape wins over equal shapes (it is cheaper and exact);
    the fallback is never selected up front.
    """
    p = as_params(params)
    if is_near_integer(p.alpha_plus):
        return DensityBranch.INTEGER_SHAPE
    if abs(p.alpha_plus - p.alpha_minus) <= INT_TOL:
        return DensityBranch.EQUAL_ALPHA_BESSEL
    return DensityBranch.WHITTAKER_GENERAL


# ---------------------------------------------------------------- helpers

def _log_prefactor(p):
    """ln of lp^ap lm^am / (s^am Gamma(ap) Gamma(am)) (convolution-form constant)."""
    s = p.lambda_plus + p.lambda_minus
    return (p.alpha_plus * math.log(p.lambda_plus)
            + p.alpha_minus * math.log(p.lambda_minus)
            - p.alpha_minus * math.log(s)
            - math.lgamma(p.alpha_plus) - math.lgamma(p.alpha_minus))


def _ln_j_fallback(c, d, z, policy):
    """ln J by whichever remaining route works: adaptive quadrature, the
    fixed exp-sinh rule (z >= 0.4), then the small-z connection formula."""
    try:
        ln_j, status = _k.j_adaptive_ln(c, d, z, min(policy.rel_tol, 1e-9),
                                        policy.max_depth + 20, _GL_X, _GL_W)
        if status == 0:
            return ln_j
    except Exception:
        pass
    if z >= 0.4 and c + d < 100.0 and c < 100.0:
        import numpy as np
        out = _k.de_lnj_grid(c, d, np.array([z]), _k._DE_LOGT, _k._DE_T, _k._DE_W)
        return float(out[0])
    b = c + d + 1.0
    if z < 0.6 and abs(b - round(b)) > 1e-6:
        lnw, status = _k.lnw_small_z(c, d, z)
        if status == 0:
            return lnw + math.lgamma(c)
    raise EvaluationError(f"all density quadrature routes failed at c={c}, d={d}, z={z}")


def _integer_log_coefs(n, am, s):
    """ln a_k, k = 0..n-1, of the integer-shape polynomial (all a_k > 0)."""
    ln_a = [0.0] * n
    # downward recurrence from a_{n-1} = 1:
    # a_k / a_{k+1} = (k+1)(am + n-2-k) / ((n-1-k) s)
    for k in range(n - 2, -1, -1):
        ln_a[k] = ln_a[k + 1] + math.log((k + 1.0) * (am + n - 2.0 - k)
                                         / ((n - 1.0 - k) * s))
    return ln_a


def _log_pdf_integer_pos(p, x):
    """ln f(x) for x > 0 with alpha_plus a positive integer."""
    n = int(round(p.alpha_plus))
    s = p.lambda_plus + p.lambda_minus
    ln_pre = (p.alpha_plus * math.log(p.lambda_plus)
              + p.alpha_minus * math.log(p.lambda_minus)
              - p.alpha_minus * math.log(s) - math.lgamma(float(n)))
    ln_a = _integer_log_coefs(n, p.alpha_minus, s)
    lx = math.log(x)
    m = max(ln_a[k] + k * lx for k in range(n))
    ssum = sum(math.exp(ln_a[k] + k * lx - m) for k in range(n))
    return ln_pre + m + math.log(ssum) - p.lambda_plus * x


def _log_pdf_equal_alpha(p, x):
    """ln f(x), x != 0, for alpha_plus == alpha_minus (Bessel-K form)."""
    a = p.alpha_plus
    lp, lm = p.lambda_plus, p.lambda_minus
    s = lp + lm
    ax = abs(x)
    ln_k = _log_bessel_k(a - 0.5, 0.5 * ax * s)
    return (-math.lgamma(a) + a * (math.log(lp) + math.log(lm) - math.log(s))
            + (a - 1.0) * math.log(ax) - 0.5 * x * (lp - lm)
            + 0.5 * (math.log(ax) + math.log(s) - math.log(math.pi)) + ln_k)


def _log_pdf_general_pos(p, x, policy, method="auto"):
    """ln f(x), x > 0, through the scaled Whittaker function."""
    s = p.lambda_plus + p.lambda_minus
    c = p.alpha_minus
    d = p.alpha_plus - 1.0
    lnw = _lnw_cd(c, d, s * x, policy, method)
    return (p.alpha_plus * math.log(p.lambda_plus)
            + p.alpha_minus * math.log(p.lambda_minus)
            - p.alpha_minus * math.log(s) - math.lgamma(p.alpha_plus)
            + (p.alpha_plus - 1.0) * math.log(x) - p.lambda_plus * x + lnw)


def _log_pdf_fallback_pos(p, x, policy):
    """ln f(x), x > 0, from the convolution integral itself."""
    s = p.lambda_plus + p.lambda_minus
    ln_j = _ln_j_fallback(p.alpha_minus, p.alpha_plus - 1.0, s * x, policy)
    return (_log_prefactor(p) + (p.alpha_plus - 1.0) * math.log(x)
            - p.lambda_plus * x + ln_j)


def _log_pdf_at_zero(p):
    """ln f(0) when alpha_plus + alpha_minus > 1 (finite continuity limit).

    The convolution integral at x = 0 collapses to a Gamma ratio:
    f(0) = lp^ap lm^am Gamma(ap+am-1) / (s^(ap+am-1) Gamma(ap) Gamma(am)).
    """
    s = p.lambda_plus + p.lambda_minus
    asum = p.alpha_sum
    return (p.alpha_plus * math.log(p.lambda_plus)
            + p.alpha_minus * math.log(p.lambda_minus)
            + math.lgamma(asum - 1.0) - (asum - 1.0) * math.log(s)
            - math.lgamma(p.alpha_plus) - math.lgamma(p.alpha_minus))


# ---------------------------------------------------------------- public API

def log_pdf(params, x, policy=DEFAULT_POLICY):
    """Natural log of the density; overflow/underflow-safe companion of pdf."""
    p = as_params(params)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    if x < 0:
        return log_pdf(p.swapped(), -x, policy)
    if x == 0.0:
        if p.alpha_sum <= 1.0:
            raise PoleError(
                "density diverges at x=0 when alpha+ + alpha- <= 1 "
                f"(got {p.alpha_sum})")
        return _log_pdf_at_zero(p)
    branch = select_branch(p)
    try:
        if branch is DensityBranch.INTEGER_SHAPE:
            return _log_pdf_integer_pos(p, x)
        if branch is DensityBranch.EQUAL_ALPHA_BESSEL:
            return _log_pdf_equal_alpha(p, x)
        return _log_pdf_general_pos(p, x, policy)
    except EvaluationError:
        return _log_pdf_fallback_pos(p, x, policy)


def pdf(params, x, policy=DEFAULT_POLICY):
    """Density f(x) of the bilateral Gamma law.

    Dispatch: integer-shape closed form, then the Bessel form for equal
    shapes, then the Whittaker representation; broken evaluations fall
    back to direct quadrature of the convolution integral.  The negative
    axis goes through the reflection identity.  At x = 0 the finite
    continuity limit is returned when alpha+ + alpha- > 1, else PoleError.
    """
    v = log_pdf(params, x, policy)
    if v < -745.0:
        return 0.0
    value = math.exp(v)
    if not math.isfinite(value):
        raise EvaluationError(f"pdf overflow at x={x}", partial=v)
    return value


def pdf_via_branch(params, x, branch, policy=DEFAULT_POLICY):
    """Force one evaluation branch (branch-agreement testing hook)."""
    p = as_params(params)
    if x < 0:
        return pdf_via_branch(p.swapped(), -x, branch, policy)
    if x == 0.0:
        return pdf(p, x, policy)
    branch = DensityBranch(branch)
    if branch is DensityBranch.INTEGER_SHAPE:
        v = _log_pdf_integer_pos(p, x)
    elif branch is DensityBranch.EQUAL_ALPHA_BESSEL:
        v = _log_pdf_equal_alpha(p, x)
    elif branch is DensityBranch.WHITTAKER_GENERAL:
        v = _log_pdf_general_pos(p, x, policy)
    else:
        v = _log_pdf_fallback_pos(p, x, policy)
    return math.exp(v) if v >= -745.0 else 0.0


def pdf_integer_shape(params, x):
    """Closed form for x > 0 when alpha+ is a positive integer:

        f(x) = lp^ap lm^am / ((lp+lm)^am (ap-1)!) * (sum_k a_k x^k) e^(-lp x)
        a_k  = C(ap-1, k) (lp+lm)^(-(ap-1-k)) prod_{l=0}^{ap-2-k} (am + l)

    (empty products are 1).
    """
    p = as_params(params)
    if not is_near_integer(p.alpha_plus):
        raise ContractViolationError(
            f"alpha_plus={p.alpha_plus} is not a positive integer")
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"requires x > 0, got {x!r}")
    return math.exp(_log_pdf_integer_pos(p, x))


def pdf_equal_alpha(params, x):
    """Bessel-form density for alpha+ == alpha- =: a and x != 0:

        f(x) = (lp lm/(lp+lm))^a / Gamma(a) * |x|^(a-1) e^(-x (lp-lm)/2)
               * sqrt(|x|(lp+lm)/pi) K_{a-1/2}(|x|(lp+lm)/2)

    Note the exponential carries the *difference* of the rates: that is
    what the Whittaker reduction W_{0,mu}(z) = sqrt(z/pi) K_mu(z/2) yields,
    and the only form consistent with the Laplace special case and the
    convolution integral.
    """
    p = as_params(params)
    if abs(p.alpha_plus - p.alpha_minus) > INT_TOL:
        raise ContractViolationError(
            f"alpha_plus={p.alpha_plus} != alpha_minus={p.alpha_minus}")
    if x == 0.0 or not math.isfinite(x):
        raise DomainError(f"requires finite x != 0, got {x!r}")
    return math.exp(_log_pdf_equal_alpha(p, x))


def pdf_derivative(params, x, policy=DEFAULT_POLICY):
    """First derivative f'(x) for x != 0 (requires alpha+ + alpha- > 1).

    For x > 0, differentiating the convolution integral termwise gives

        f'(x) = -lp f(x) + (ap-1) C e^(-lp x) int v^(am-1)
                (x + v/(lp+lm))^(ap-2) e^(-v) dv,

    evaluated as a second J-integral; x < 0 by reflection (antisymmetric
    role swap).
    """
    p = as_params(params)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError(f"requires finite x != 0, got {x!r}")
    if p.alpha_sum <= 1.0:
        raise DomainError(
            "pdf_derivative requires alpha+ + alpha- > 1, got "
            f"{p.alpha_sum}")
    if x < 0:
        return -pdf_derivative(p.swapped(), -x, policy)
    s = p.lambda_plus + p.lambda_minus
    term1 = -p.lambda_plus * pdf(p, x, policy)
    if abs(p.alpha_plus - 1.0) <= INT_TOL:
        return term1  # polynomial part is constant; only the -lp f term survives
    try:
        ln_j2 = _ln_j_fallback(p.alpha_minus, p.alpha_plus - 2.0, s * x, policy)
    except EvaluationError:
        raise
    mag = math.exp(_log_prefactor(p) - p.lambda_plus * x
                   + (p.alpha_plus - 2.0) * math.log(x) + ln_j2)
    return term1 + (p.alpha_plus - 1.0) * mag


def f_prime_at_zero(params):
    """Closed form of f'(0) when both shapes exceed 1:

        f'(0) = lp^ap lm^am / (lp+lm)^(ap+am-2)
                * Gamma(ap+am-2) / (Gamma(ap-1) Gamma(am))
                * [1 - lp/(lp+lm) * (ap+am-2)/(ap-1)]

    Its sign reproduces the mode trichotomy on lm*ap - lp*am vs lm - lp.
    """
    p = as_params(params)
    if not (p.alpha_plus > 1.0 and p.alpha_minus > 1.0):
        raise ContractViolationError(
            "f_prime_at_zero requires alpha+ > 1 and alpha- > 1, got "
            f"({p.alpha_plus}, {p.alpha_minus})")
    s = p.lambda_plus + p.lambda_minus
    asum = p.alpha_sum
    ln_mag = (p.alpha_plus * math.log(p.lambda_plus)
              + p.alpha_minus * math.log(p.lambda_minus)
              - (asum - 2.0) * math.log(s)
              + math.lgamma(asum - 2.0) - math.lgamma(p.alpha_plus - 1.0)
              - math.lgamma(p.alpha_minus))
    bracket = 1.0 - (p.lambda_plus / s) * (asum - 2.0) / (p.alpha_plus - 1.0)
    return math.exp(ln_mag) * bracket
