"""Distribution-level structure: characteristic function, Levy measure,
moments, closure under scaling/convolution, CDF/quantile, and the
Variance Gamma bridge."""

import cmath
import math
from dataclasses import dataclass

from . import _kernels as _k
from ._kernels import _GL_X, _GL_W
from .errors import ContractViolationError, DomainError, EvaluationError
from .params import INT_TOL, BgParams, as_params
from .policy import DEFAULT_POLICY
from .specfun import _log_bessel_k


@dataclass(frozen=True)
class MomentSet:
    """First four standardized moments; kurtosis is the non-excess one."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float

    def __post_init__(self):
        if not self.variance > 0:
            raise DomainError("variance must be positive")
        if not self.kurtosis > 3.0:
            raise DomainError("kurtosis of a bilateral Gamma law exceeds 3")


@dataclass(frozen=True)
class VgParams:
    """Variance Gamma parameters (mu, sigma_sq, nu)."""

    mu: float
    sigma_sq: float
    nu: float

    def __post_init__(self):
        if not (self.sigma_sq > 0 and self.nu > 0):
            raise DomainError("sigma_sq and nu must be positive")


def char_fn(params, z):
    """Characteristic function
    phi(z) = (lp/(lp - iz))^ap * (lm/(lm + iz))^am
    with all powers on the principal branch, evaluated as
    exp(a (ln r + i theta)), theta in (-pi, pi]."""
    p = as_params(params)
    if z == 0.0:
        return 1.0 + 0.0j
    lp, lm = p.lambda_plus, p.lambda_minus
    ln_r1 = math.log(lp) - 0.5 * math.log(lp * lp + z * z)
    th1 = math.atan2(z, lp)
    ln_r2 = math.log(lm) - 0.5 * math.log(lm * lm + z * z)
    th2 = -math.atan2(z, lm)
    return cmath.exp(complex(p.alpha_plus * ln_r1 + p.alpha_minus * ln_r2,
                             p.alpha_plus * th1 + p.alpha_minus * th2))


def levy_density(params, x):
    """Levy (jump intensity) density: (ap/x) e^(-lp x) on x>0,
    (am/|x|) e^(-lm |x|) on x<0; pole at 0 is outside the domain."""
    p = as_params(params)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError("Levy density has a non-integrable pole at x = 0")
    if x > 0:
        return p.alpha_plus / x * math.exp(-p.lambda_plus * x)
    return p.alpha_minus / abs(x) * math.exp(-p.lambda_minus * abs(x))


def k_fn(params, x):
    """x times the Levy density: ap e^(-lp x) on x>0, -am e^(-lm |x|) on x<0.

    Strictly decreasing on each half-line, which is the
    selfdecomposability witness for this family."""
    p = as_params(params)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError("k_fn is undefined at x = 0")
    if x > 0:
        return p.alpha_plus * math.exp(-p.lambda_plus * x)
    return -p.alpha_minus * math.exp(-p.lambda_minus * abs(x))


def moments(params):
    """Mean, variance, skewness and kurtosis in closed form."""
    p = as_params(params)
    ap, lp, am, lm = p.astuple()
    m2 = ap / lp**2 + am / lm**2
    m3 = ap / lp**3 - am / lm**3
    m4 = ap / lp**4 + am / lm**4
    return MomentSet(
        mean=ap / lp - am / lm,
        variance=m2,
        skewness=2.0 * m3 / m2**1.5,
        kurtosis=3.0 + 6.0 * m4 / m2**2,
    )


def scale(params, c):
    """Law of c*X: shapes unchanged, rates divided by c."""
    p = as_params(params)
    if not (math.isfinite(c) and c > 0):
        raise DomainError(f"scale factor must be positive, got {c!r}")
    return BgParams(p.alpha_plus, p.lambda_plus / c,
                    p.alpha_minus, p.lambda_minus / c)


def convolve(p1, p2):
    """Law of the sum of independent variables; requires matching rates."""
    a = as_params(p1)
    b = as_params(p2)
    for ra, rb, name in ((a.lambda_plus, b.lambda_plus, "lambda_plus"),
                         (a.lambda_minus, b.lambda_minus, "lambda_minus")):
        if abs(ra - rb) > 1e-12 * max(abs(ra), abs(rb)):
            raise ContractViolationError(
                f"convolution requires equal {name}: {ra} vs {rb}")
    return BgParams(a.alpha_plus + b.alpha_plus, a.lambda_plus,
                    a.alpha_minus + b.alpha_minus, a.lambda_minus)


def cdf(params, x, policy=DEFAULT_POLICY):
    """Distribution function, from the X - Y construction:

        F(x) = int_0^inf P(ap, lp(x+y)) dGamma(am, lm)(y)   for x >= 0,

    with the regularized incomplete gamma as the inner factor and the
    integral truncated at the 1 - 1e-14 quantile of the Gamma(am, lm)
    component; x < 0 via F(x) = 1 - F_swapped(-x)."""
    p = as_params(params)
    if not math.isfinite(x):
        if x == math.inf:
            return 1.0
        if x == -math.inf:
            return 0.0
        raise DomainError("x must not be NaN")
    if x < 0:
        return 1.0 - cdf(p.swapped(), -x, policy)
    val, status = _k.cdf_nonneg(x, p.alpha_plus, p.lambda_plus,
                                p.alpha_minus, p.lambda_minus,
                                policy.quad_abs_tol, policy.max_depth,
                                _GL_X, _GL_W)
    if status != 0:
        raise EvaluationError(f"cdf quadrature failed (status {status}) at x={x}",
                              partial=val)
    return val


def quantile(params, u, policy=DEFAULT_POLICY):
    """Inverse CDF: the x with |cdf(x) - u| <= 1e-10.

    Starts from the moments-based bracket mean +- 20 stddev, doubles the
    failing side until the bracket straddles u (at most 60 doublings;
    the semiheavy tails make this terminate quickly), then refines by a
    bisection/secant hybrid."""
    p = as_params(params)
    if not (0.0 < u < 1.0):
        raise DomainError(f"quantile requires 0 < u < 1, got {u!r}")
    mom = moments(p)
    sd = math.sqrt(mom.variance)
    lo = mom.mean - 20.0 * sd
    hi = mom.mean + 20.0 * sd
    flo = cdf(p, lo, policy)
    fhi = cdf(p, hi, policy)
    width = hi - lo
    n_dbl = 0
    while flo > u:
        width *= 2.0
        lo = mom.mean - width
        flo = cdf(p, lo, policy)
        n_dbl += 1
        if n_dbl > 60:
            raise EvaluationError(f"quantile bracketing failed for u={u}")
    n_dbl = 0
    while fhi < u:
        width *= 2.0
        hi = mom.mean + width
        fhi = cdf(p, hi, policy)
        n_dbl += 1
        if n_dbl > 60:
            raise EvaluationError(f"quantile bracketing failed for u={u}")
    x = lo + (hi - lo) * 0.5
    for it in range(200):
        fx = cdf(p, x, policy)
        if abs(fx - u) <= 1e-10:
            return x
        if fx < u:
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        if hi - lo < 4e-16 * max(1.0, abs(lo), abs(hi)):
            return 0.5 * (lo + hi)
        # alternate secant with bisection so the bracket provably shrinks
        # (plain false position stagnates when one endpoint sticks)
        if it % 2 == 0 and fhi > flo:
            x = lo + (u - flo) * (hi - lo) / (fhi - flo)
            if not (lo < x < hi):
                x = 0.5 * (lo + hi)
        else:
            x = 0.5 * (lo + hi)
    raise EvaluationError(f"quantile iteration did not converge for u={u}",
                          partial=x)


def vg_params(params):
    """Variance Gamma parameters of a bilateral Gamma law with equal shapes:
    (mu, sigma^2, nu) = (a/lp - a/lm, 2a/(lp lm), 1/a)."""
    p = as_params(params)
    if abs(p.alpha_plus - p.alpha_minus) > INT_TOL:
        raise ContractViolationError(
            "only equal-shape bilateral Gamma laws are Variance Gamma "
            f"(got alpha+ = {p.alpha_plus}, alpha- = {p.alpha_minus})")
    a = p.alpha_plus
    return VgParams(mu=a / p.lambda_plus - a / p.lambda_minus,
                    sigma_sq=2.0 * a / (p.lambda_plus * p.lambda_minus),
                    nu=1.0 / a)


def vg_pdf(vg, x, policy=DEFAULT_POLICY):
    """Variance Gamma density in the (mu, sigma^2, nu) parametrization:

        h(x) = 2 e^(mu x / s^2) / (nu^(1/nu) sqrt(2 pi) s Gamma(1/nu))
               * (x^2/(2 s^2/nu + mu^2))^(1/(2 nu) - 1/4)
               * K_{1/nu - 1/2}(sqrt(x^2 (2 s^2/nu + mu^2)) / s^2).
    """
    if not isinstance(vg, VgParams):
        vg = VgParams(*vg)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError(f"vg_pdf requires finite x != 0, got {x!r}")
    mu, s2, nu = vg.mu, vg.sigma_sq, vg.nu
    q = 2.0 * s2 / nu + mu * mu
    arg = math.sqrt(x * x * q) / s2
    ln_k = _log_bessel_k(1.0 / nu - 0.5, arg, policy)
    ln_h = (math.log(2.0) + mu * x / s2 - math.log(nu) / nu
            - 0.5 * math.log(2.0 * math.pi) - 0.5 * math.log(s2)
            - math.lgamma(1.0 / nu)
            + (0.5 / nu - 0.25) * (2.0 * math.log(abs(x)) - math.log(q))
            + ln_k)
    if ln_h < -745.0:
        return 0.0
    return math.exp(ln_h)
