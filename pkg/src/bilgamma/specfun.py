"""Special-function kernel: log-gamma, regularized incomplete gamma,
exponential integral E1, confluent hypergeometric Phi, Whittaker W and
modified Bessel K.

Real arguments only.  Every function either returns a finite float or
raises a typed error; NaNs are never passed through.  All routines are
pure and re-entrant.
"""

import math

from . import _kernels as _k
from ._kernels import EULER_GAMMA, _GL_X, _GL_W
from .errors import DomainError, EvaluationError
from .policy import DEFAULT_POLICY

__all__ = [
    "EULER_GAMMA", "ln_gamma", "reg_lower_incomplete_gamma", "exp_integral_e1",
    "kummer_phi", "whittaker_w", "whittaker_w_via_m", "bessel_k",
]


def _check_finite(name, value):
    if not math.isfinite(value):
        raise EvaluationError(f"{name} produced a non-finite value", partial=value)
    return value


def ln_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def reg_lower_incomplete_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) in [0, 1].

    Series for x < a+1 and a continued fraction for the complement
    otherwise (Abramowitz & Stegun 6.5; Numerical Recipes scheme).
    """
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"shape a must be finite and positive, got {a!r}")
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"x must be finite and nonnegative, got {x!r}")
    return _check_finite("reg_lower_incomplete_gamma", _k.reg_lower_gamma(a, x))


def exp_integral_e1(x):
    """Exponential integral E1(x) = int_1^inf e^(-x t)/t dt for x > 0.

    Small x: the classical series -gamma - ln x - sum (-1)^n x^n/(n n!);
    large x: continued fraction (both from Abramowitz & Stegun ch. 5).
    """
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"exp_integral_e1 requires x > 0, got {x!r}")
    return _check_finite("exp_integral_e1", _k.exp_e1(x))


def kummer_phi(alpha, gamma_p, z, policy=DEFAULT_POLICY):
    """Confluent hypergeometric Phi(alpha, gamma; z) = 1F1 by power series.

    gamma must not be zero or a negative integer (poles of the series).
    Raises EvaluationError carrying the partial sum if the series fails
    to reach policy.rel_tol within policy.max_terms terms.
    """
    if not all(math.isfinite(v) for v in (alpha, gamma_p, z)):
        raise DomainError("kummer_phi requires finite arguments")
    if gamma_p <= 0 and gamma_p == round(gamma_p):
        raise DomainError(f"gamma={gamma_p} is a nonpositive integer (series pole)")
    if z == 0.0:
        return 1.0
    val, terms, status = _k.kummer_series(alpha, gamma_p, z,
                                          policy.rel_tol, policy.max_terms)
    if status != 0:
        raise EvaluationError(
            f"kummer_phi series did not converge in {terms} terms",
            partial=val, detail={"terms": terms})
    return _check_finite("kummer_phi", val)


def _lnw_cd(c, d, z, policy, method="auto"):
    """ln of the scaled Whittaker function What = e^(z/2) z^(-lam) W_{lam,mu}(z),
    parametrized by c = mu-lam+1/2 and d = mu+lam-1/2.

    What(z) = J(c,d,z)/Gamma(c) with
    J = int_0^inf t^(c-1) e^(-t) (1+t/z)^d dt, which also equals
    z^c U(c, c+d+1, z) (DLMF 13.4.4 / 13.14.3).
    """
    if method == "auto":
        method = "asymptotic" if z >= policy.asymptotic_switch_z else "quadrature"
    if method == "asymptotic":
        lnw, minrel, status = _k.j_asym_lnw(c, d, z, policy.rel_tol)
        if status != 0:
            raise EvaluationError(
                "large-argument series truncation error "
                f"{minrel:.2e} exceeds rel_tol at z={z}",
                partial=lnw, detail={"min_term_rel": minrel})
        return lnw
    if method == "quadrature":
        ln_j, status = _k.j_adaptive_ln(c, d, z, min(policy.rel_tol, 1e-9),
                                        policy.max_depth, _GL_X, _GL_W)
        if status != 0:
            raise EvaluationError(
                f"adaptive quadrature failed (status {status}) at c={c}, d={d}, z={z}",
                partial=ln_j)
        return ln_j - math.lgamma(c)
    raise DomainError(f"unknown method {method!r}")


def whittaker_w(lam, mu, z, policy=DEFAULT_POLICY, method="auto"):
    """Whittaker function W_{lam,mu}(z) for z > 0 and mu - lam > -1/2.

    Below policy.asymptotic_switch_z the integral representation

        W = z^lam e^(-z/2)/Gamma(mu-lam+1/2)
            * int_0^inf t^(mu-lam-1/2) e^(-t) (1+t/z)^(mu+lam-1/2) dt

    is evaluated by adaptive interval-halving quadrature; above it, the
    large-argument series e^(-z/2) z^lam H(z) truncated at its smallest
    term.  ``method`` forces one path ("quadrature"/"asymptotic") for
    cross-validation.
    """
    if not (math.isfinite(z) and z > 0):
        raise DomainError(f"whittaker_w requires z > 0, got {z!r}")
    if not (mu - lam > -0.5):
        raise DomainError(f"whittaker_w requires mu - lam > -1/2, got {mu - lam}")
    c = mu - lam + 0.5
    d = mu + lam - 0.5
    lnw = _lnw_cd(c, d, z, policy, method)
    val = lam * math.log(z) - 0.5 * z + lnw
    if val < -745.0:
        return 0.0  # honest underflow
    return _check_finite("whittaker_w", math.exp(val))


def whittaker_w_via_m(lam, mu, z, policy=DEFAULT_POLICY):
    """W_{lam,mu} assembled from the two M-function solutions.

        W = Gamma(-2mu)/Gamma(1/2-mu-lam) M_{lam,mu}
          + Gamma(2mu)/Gamma(1/2+mu-lam)  M_{lam,-mu},
        M_{lam,mu}(z) = z^(mu+1/2) e^(-z/2) Phi(mu-lam+1/2, 2mu+1; z).

    Cross-check path only: it has poles at 2mu integer and loses all
    precision to cancellation for large z (the two terms grow like
    e^(+z/2) while W decays like e^(-z/2)); keep z moderate.
    """
    if not (math.isfinite(z) and z > 0):
        raise DomainError(f"requires z > 0, got {z!r}")
    two_mu = 2.0 * mu
    if abs(two_mu - round(two_mu)) < 1e-9:
        raise DomainError(f"2*mu={two_mu} too close to an integer (Gamma pole)")

    def m_fn(mu_s):
        phi = kummer_phi(mu_s - lam + 0.5, 2.0 * mu_s + 1.0, z, policy)
        return math.exp((mu_s + 0.5) * math.log(z) - 0.5 * z) * phi

    lg1, s1 = _k.lgamma_signed(-two_mu)
    lg2, s2 = _k.lgamma_signed(0.5 - mu - lam)
    lg3, s3 = _k.lgamma_signed(two_mu)
    lg4, s4 = _k.lgamma_signed(0.5 + mu - lam)
    term1 = 0.0
    if s2 != 0.0:
        term1 = (s1 * s2) * math.exp(lg1 - lg2) * m_fn(mu)
    term2 = 0.0
    if s4 != 0.0:
        term2 = (s3 * s4) * math.exp(lg3 - lg4) * m_fn(-mu)
    return _check_finite("whittaker_w_via_m", term1 + term2)


def _log_bessel_k(nu, x, policy=DEFAULT_POLICY):
    """ln K_nu(x) for x > 0 (any real nu; K is even in nu)."""
    anu = abs(nu)
    half = 0.5 * (math.log(math.pi) - math.log(2.0 * x))
    two_nu = 2.0 * anu
    if abs(two_nu - round(two_nu)) <= 1e-12 and round(two_nu) % 2 == 1:
        # half-integer order: K_{n+1/2} = sqrt(pi/2x) e^-x * polynomial in 1/x
        n = int(round(anu - 0.5))
        km = 1.0  # scaled K_{1/2}
        if n == 0:
            return half - x
        kc = 1.0 + 1.0 / x  # scaled K_{3/2}
        for j in range(1, n):
            km, kc = kc, km + (2.0 * j + 1.0) / x * kc
        return half - x + math.log(kc)
    # K_nu(x) = sqrt(pi/(2x)) W_{0,nu}(2x)  =>  ln K = half - x + ln What(2x)
    lnw = _lnw_cd(anu + 0.5, anu - 0.5, 2.0 * x, policy)
    return half - x + lnw


def bessel_k(nu, x, policy=DEFAULT_POLICY):
    """Modified Bessel function of the third kind K_nu(x), x > 0.

    Half-integer orders use the closed forms (upward recurrence from
    K_{1/2}); other orders go through W_{0,nu}(2x) = sqrt(2x/pi) K_nu(x).
    Satisfies K_nu = K_{-nu} by construction.
    """
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"bessel_k requires x > 0, got {x!r}")
    if not math.isfinite(nu):
        raise DomainError("bessel_k requires finite order")
    val = _log_bessel_k(nu, x, policy)
    if val < -745.0:
        return 0.0
    return _check_finite("bessel_k", math.exp(val))
