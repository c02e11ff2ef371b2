"""Independent brute-force reference implementations.

Used only by tests and the CLI ``verify`` subcommand.  These deliberately
avoid the product evaluation paths: the quadrature oracle integrates the
defining Gamma-convolution integrand directly with QUADPACK, the FFT
oracle inverts the characteristic function, and the Monte Carlo oracle
estimates moments from samples.  Performance is a non-goal here.
"""

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import quad

from ._kernels import lgamma_signed
from .errors import OracleError
from .params import as_params
from .specfun import ln_gamma

_ASYM_SWITCH_W = 20.0  # |Z x| above which the tail integral uses integration by parts


@dataclass
class OracleReport:
    target: str
    max_abs_err: float
    max_rel_err: Optional[float]
    grid: List[float]
    passed: bool
    abs_threshold: Optional[float] = None
    rel_threshold: Optional[float] = None
    detail: dict = field(default_factory=dict)


# ----------------------------------------------------------------------
# quadrature oracle
# ----------------------------------------------------------------------

def pdf_quadrature_oracle(params, x, abs_tol=1e-12):
    """Density at x > 0 by direct adaptive quadrature of

        f(x) = lp^ap lm^am / ((lp+lm)^am Gamma(ap) Gamma(am)) e^(-lp x)
               * int_0^inf v^(am-1) (x + v/(lp+lm))^(ap-1) e^(-v) dv,

    independent of every product evaluation path (QUADPACK on the raw
    integrand, split at the v = x(lp+lm) balance point and decay scales).
    """
    p = as_params(params)
    if not (math.isfinite(x) and x > 0):
        raise OracleError(f"quadrature oracle requires x > 0, got {x!r}")
    ap, lp, am, lm = p.astuple()
    s = lp + lm
    ln_pre = (ap * math.log(lp) + am * math.log(lm) - am * math.log(s)
              - ln_gamma(ap) - ln_gamma(am)) - lp * x

    def integrand(v):
        if v <= 0.0:
            return 0.0
        return math.exp((am - 1.0) * math.log(v)
                        + (ap - 1.0) * math.log(x + v / s) - v)

    cuts = {x * s, 1.0, 10.0, am + 10.0 * math.sqrt(am) + 10.0}
    # geometric ladder between the balance point and O(1): the integrand
    # sweeps v^(ap+am-2)-type decades there and QUADPACK wants short spans
    v_bal = x * s
    while v_bal < 0.5:
        v_bal *= 100.0
        cuts.add(min(v_bal, 0.5))
    cuts = sorted(c for c in cuts if c > 0.0)
    total = 0.0
    err_sum = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lo = 0.0
        for c in cuts:
            val, err = quad(integrand, lo, c, epsabs=1e-300, epsrel=1e-12,
                            limit=500)
            total += val
            err_sum += err
            lo = c
        val, err = quad(integrand, lo, math.inf, epsabs=1e-300, epsrel=1e-12,
                        limit=500)
        total += val
        err_sum += err
    value = math.exp(ln_pre) * total
    if not math.isfinite(value) or total <= 0.0:
        raise OracleError(f"quadrature oracle failed at x={x}")
    if err_sum > max(abs_tol * math.exp(-ln_pre), 1e-9 * total):
        raise OracleError(
            f"quadrature oracle error estimate too large at x={x}: {err_sum}")
    return value


# ----------------------------------------------------------------------
# FFT inversion oracle
# ----------------------------------------------------------------------

def _tail_g(p, w):
    """g_p(w) = int_1^inf u^(-p) e^(-i w u) du for real w, vectorized.

    |w| <= 20: via the incomplete-gamma series (or the generalized
    exponential integral recurrence when p is an integer); larger |w|:
    integration-by-parts asymptotic series.
    """
    w = np.asarray(w, dtype=float)
    out = np.empty(w.shape, dtype=complex)
    small = np.abs(w) <= _ASYM_SWITCH_W
    int_p = abs(p - round(p)) < 1e-8

    ws = w[small]
    res = np.empty(ws.shape, dtype=complex)
    zero = ws == 0.0
    res[zero] = 1.0 / (p - 1.0)
    nz = ~zero
    zeta = 1j * ws[nz]
    if int_p:
        m = int(round(p))
        # E_1 by series, then E_{n+1} = (e^-zeta - zeta E_n)/n
        e_val = -np.euler_gamma - np.log(zeta)
        term = np.ones_like(zeta)
        for k in range(1, 200):
            term *= -zeta / k
            e_val -= term / k
            if np.all(np.abs(term) < 1e-18 * np.maximum(np.abs(e_val), 1e-30)):
                break
        for n in range(1, m):
            e_val = (np.exp(-zeta) - zeta * e_val) / n
        res[nz] = e_val
    else:
        a = 1.0 - p
        ssum = np.zeros_like(zeta)
        term = np.ones_like(zeta)
        for k in range(300):
            ssum += term / (a + k)
            term *= -zeta / (k + 1.0)
            if k > 3 and np.all(np.abs(term) < 1e-18 * np.maximum(np.abs(ssum), 1e-30)):
                break
        lg, sg = lgamma_signed(a)
        gamma_a = sg * math.exp(lg)
        res[nz] = zeta ** (-a) * (gamma_a - zeta**a * ssum)
    out[small] = res

    wl = w[~small]
    if wl.size:
        iw = 1j * wl
        coef = 1.0
        ssum = np.zeros_like(iw)
        for k in range(14):
            ssum += coef / iw ** (k + 1)
            coef *= -(p + k)
        out[~small] = np.exp(-iw) * ssum
    return out


def pdf_fft_oracle(params, grid_size=1 << 16, domain_halfwidth=None):
    """Density on a symmetric grid by discrete Fourier inversion of the
    characteristic function (trapezoidal sum over a truncated frequency
    window) plus a two-term analytic correction for the truncated
    |z| > Z power tails.  Requires alpha+ + alpha- > 1 so that phi is
    integrable.  Returns (grid, values)."""
    p = as_params(params)
    ap, lp, am, lm = p.astuple()
    s_exp = ap + am
    if s_exp <= 1.0:
        raise OracleError("FFT inversion needs alpha+ + alpha- > 1 "
                          f"(got {s_exp}); phi is not integrable")
    n = int(grid_size)
    if n < (1 << 12) or (n & (n - 1)) != 0:
        raise OracleError(f"grid_size must be a power of two >= 4096, got {n}")
    mean = ap / lp - am / lm
    sd = math.sqrt(ap / lp**2 + am / lm**2)
    if domain_halfwidth is None:
        domain_halfwidth = abs(mean) + 40.0 * sd
    if not domain_halfwidth > 0:
        raise OracleError("domain_halfwidth must be positive")
    h = float(domain_halfwidth)
    dx = 2.0 * h / n
    z_max = math.pi / dx
    dz = 2.0 * z_max / n
    j = np.arange(n)
    zj = -z_max + j * dz
    phi = ((lp / (lp - 1j * zj)) ** ap) * ((lm / (lm + 1j * zj)) ** am)
    xk = -h + j * dx
    # trapezoid on [-Z, Z): the two half-weight endpoints fold onto sample 0
    coeffs = phi * np.exp(-1j * j * dz * (-h))
    f_vals = (dz / (2.0 * math.pi)) * np.real(np.exp(1j * z_max * xk)
                                              * np.fft.fft(coeffs))
    # analytic tails: phi(z) ~ B z^-s (1 - i c1/z) for z -> +inf
    b_const = (lp ** ap) * (lm ** am) * cmath.exp(1j * math.pi * (ap - am) / 2.0)
    c1 = ap * lp - am * lm
    w = z_max * xk
    g_s = z_max ** (1.0 - s_exp) * _tail_g(s_exp, w)
    g_s1 = z_max ** (-s_exp) * _tail_g(s_exp + 1.0, w)
    tail = (b_const * (g_s - 1j * c1 * g_s1)).real / math.pi
    return xk, f_vals + tail


# ----------------------------------------------------------------------
# Monte Carlo moment oracle
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class McMoments:
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float


def mc_moment_oracle(params, n, rng):
    """Empirical mean/variance/skewness/kurtosis with delete-one jackknife
    standard errors (vectorized through leave-one-out power sums)."""
    from .simfit import sample  # local import: oracles depend on no product pdf path

    p = as_params(params)
    n = int(n)
    if n < 10**4:
        raise OracleError(f"mc_moment_oracle needs n >= 1e4, got {n}")
    x = sample(p, n, rng)
    s1 = float(np.sum(x))
    s2 = float(np.sum(x**2))
    s3 = float(np.sum(x**3))
    s4 = float(np.sum(x**4))

    def stats(c1, c2, c3, c4, m):
        mu = c1 / m
        m2 = c2 / m - mu**2
        m3 = c3 / m - 3.0 * mu * c2 / m + 2.0 * mu**3
        m4 = c4 / m - 4.0 * mu * c3 / m + 6.0 * mu**2 * c2 / m - 3.0 * mu**4
        return mu, m2, m3 / m2**1.5, m4 / m2**2

    mean, var, skew, kurt = stats(s1, s2, s3, s4, n)
    # leave-one-out estimates, vectorized
    m1 = (s1 - x) / (n - 1)
    m2 = (s2 - x**2) / (n - 1) - m1**2
    m3 = ((s3 - x**3) / (n - 1) - 3.0 * m1 * (s2 - x**2) / (n - 1)
          + 2.0 * m1**3)
    m4 = ((s4 - x**4) / (n - 1) - 4.0 * m1 * (s3 - x**3) / (n - 1)
          + 6.0 * m1**2 * (s2 - x**2) / (n - 1) - 3.0 * m1**4)
    loo = np.stack([m1, m2, m3 / m2**1.5, m4 / m2**2])
    fac = (n - 1.0) / n
    ses = np.sqrt(fac * np.sum((loo - loo.mean(axis=1, keepdims=True))**2,
                               axis=1))
    return McMoments(mean, var, skew, kurt, *ses)


# ----------------------------------------------------------------------
# verification suite (CLI `verify`)
# ----------------------------------------------------------------------

VERIFY_PARAM_SETS = [
    (1.0, 1.0, 1.0, 1.0),
    (2.0, 1.0, 1.0, 1.0),
    (3.0, 2.0, 0.5, 1.0),
    (0.5, 1.0, 0.5, 1.0),
    (1.55, 133.96, 0.94, 88.92),
    (0.7, 2.0, 1.3, 3.0),
]


def _oracle_grid(p, n_per_side=11):
    """Log-spaced probe grid (both signs) scaled to the distribution width."""
    from .distribution import moments
    sd = math.sqrt(moments(p).variance)
    pos = np.geomspace(0.02 * sd, 4.0 * sd, n_per_side)
    return np.concatenate([-pos[::-1], pos])


def run_verification_suite(rel_threshold=1e-7, abs_threshold=1e-5,
                           mc_n=10**5, seed=20250801, policy=None):
    """Cross-check the product pdf and moments against the oracles.

    Returns a list of OracleReport entries (one per oracle family and
    parameter set); a report fails when its error exceeds the stated
    threshold.
    """
    from .density import pdf
    from .distribution import moments
    from .policy import DEFAULT_POLICY
    from .simfit import RngState

    policy = policy or DEFAULT_POLICY
    reports = []

    for ps in VERIFY_PARAM_SETS:
        p = as_params(ps)
        grid = _oracle_grid(p)
        max_rel = 0.0
        max_abs = 0.0
        for x in grid:
            ref = (pdf_quadrature_oracle(p, x) if x > 0
                   else pdf_quadrature_oracle(p.swapped(), -x))
            got = pdf(p, float(x), policy)
            err = abs(got - ref)
            max_abs = max(max_abs, err)
            max_rel = max(max_rel, err / abs(ref))
        reports.append(OracleReport(
            target=f"pdf_vs_quadrature{ps}",
            max_abs_err=float(max_abs), max_rel_err=float(max_rel),
            grid=[float(g) for g in grid],
            passed=bool(max_rel <= rel_threshold),
            rel_threshold=rel_threshold))

    for ps in VERIFY_PARAM_SETS:
        p = as_params(ps)
        if p.alpha_sum <= 1.0:
            continue
        xg, fg = pdf_fft_oracle(p, grid_size=1 << 14)
        from .distribution import quantile
        lo = quantile(p, 0.005, policy)
        hi = quantile(p, 0.995, policy)
        sel = np.where((xg >= lo) & (xg <= hi))[0]
        sel = sel[:: max(1, sel.size // 60)]
        max_abs = 0.0
        for i in sel:
            max_abs = max(max_abs, abs(fg[i] - pdf(p, float(xg[i]), policy)))
        reports.append(OracleReport(
            target=f"pdf_vs_fft{ps}",
            max_abs_err=float(max_abs), max_rel_err=None,
            grid=[float(lo), float(hi)],
            passed=bool(max_abs <= abs_threshold),
            abs_threshold=abs_threshold))

    rng = RngState(seed)
    for ps in VERIFY_PARAM_SETS[:3]:
        p = as_params(ps)
        mom = moments(p)
        mc = mc_moment_oracle(p, mc_n, rng)
        sigmas = max(
            abs(mc.mean - mom.mean) / mc.se_mean,
            abs(mc.variance - mom.variance) / mc.se_variance,
            abs(mc.skewness - mom.skewness) / mc.se_skewness,
            abs(mc.kurtosis - mom.kurtosis) / mc.se_kurtosis,
        )
        reports.append(OracleReport(
            target=f"moments_vs_mc{ps}",
            max_abs_err=float(abs(mc.mean - mom.mean)),
            max_rel_err=float(sigmas),
            grid=[], passed=bool(sigmas <= 3.0),
            detail={"interpretation": "max_rel_err is in jackknife sigmas, "
                                      "threshold 3"}))
    return reports
