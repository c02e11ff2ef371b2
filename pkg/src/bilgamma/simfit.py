"""Exact sampling via the X - Y construction and maximum-likelihood fitting.

The fit objective evaluates the log-density of the whole sample through a
per-parameter-vector table of the scaled Whittaker function on a log-spaced
argument grid (exp-sinh quadrature for moderate/large arguments, the
two-series connection formula for small ones) plus cubic interpolation;
this keeps one objective evaluation on 1e5 points at a few milliseconds
while agreeing with the pointwise density to ~1e-14.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels as _k
from ._backend import USE_NUMBA
from ._kernels import _GL_X, _GL_W
from .density import _integer_log_coefs, _log_pdf_at_zero
from .errors import DomainError, EvaluationError, FitError
from .params import BgParams, as_params, is_near_integer
from .policy import DEFAULT_POLICY

_INIT_CLAMP = (1e-3, 1e4)


# ----------------------------------------------------------------------
# deterministic RNG state
# ----------------------------------------------------------------------

class RngState:
    """Deterministic random stream: a seed plus a PCG64 generator.

    Identical seeds yield bit-identical sample streams.  Not safe to share
    one instance across threads; spawn children instead.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._seq = np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def spawn(self, n):
        """n independent child states, deterministic in (seed, n)."""
        return [_from_seq(s) for s in self._seq.spawn(n)]


def _from_seq(seq):
    st = RngState.__new__(RngState)
    st.seed = None
    st._seq = seq
    st.generator = np.random.Generator(np.random.PCG64(seq))
    return st


# ----------------------------------------------------------------------
# sampling
# ----------------------------------------------------------------------

def _gamma_array(shape, rate, size, gen):
    """Gamma(shape, rate) draws by Marsaglia-Tsang squeeze rejection;
    shape < 1 is lifted with the boost Gamma(a) = Gamma(a+1) * U^(1/a)."""
    a = float(shape)
    boost = None
    if a < 1.0:
        boost = gen.uniform(size=size) ** (1.0 / a)
        a = a + 1.0
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        x = gen.standard_normal(pending.size)
        v = (1.0 + c * x) ** 3
        u = gen.uniform(size=pending.size)
        ok = (v > 0.0) & (np.log(u) < 0.5 * x * x + d - d * v
                          + d * np.log(np.where(v > 0.0, v, 1.0)))
        out[pending[ok]] = d * v[ok]
        pending = pending[~ok]
    if boost is not None:
        out *= boost
    return out / rate


def gamma_variate(shape, rate, rng):
    """One Gamma(shape, rate) draw, advancing the rng state."""
    if not (math.isfinite(shape) and shape > 0 and math.isfinite(rate) and rate > 0):
        raise DomainError(f"gamma_variate requires positive shape and rate, "
                          f"got ({shape!r}, {rate!r})")
    return float(_gamma_array(shape, rate, 1, rng.generator)[0])


def sample(params, n, rng):
    """n independent draws of X - Y, X ~ Gamma(a+, l+), Y ~ Gamma(a-, l-)."""
    p = as_params(params)
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    gen = rng.generator
    x = _gamma_array(p.alpha_plus, p.lambda_plus, int(n), gen)
    y = _gamma_array(p.alpha_minus, p.lambda_minus, int(n), gen)
    return x - y


# ----------------------------------------------------------------------
# batched log-density
# ----------------------------------------------------------------------

def _lnj_point(c, d, z, policy):
    ln_j, status = _k.j_adaptive_ln(c, d, z, min(policy.rel_tol, 1e-9),
                                    policy.max_depth, _GL_X, _GL_W)
    if status != 0:
        raise EvaluationError(f"pointwise quadrature failed at c={c}, d={d}, z={z}")
    return ln_j


def _side_logpdf(xabs, ap, lp, am, lm, policy):
    """ln f at xabs > 0 for the given orientation (vectorized)."""
    n = xabs.shape[0]
    if n == 0:
        return np.empty(0)
    s = lp + lm
    if is_near_integer(ap):
        n_int = int(round(ap))
        ln_pre = (ap * math.log(lp) + am * math.log(lm)
                  - am * math.log(s) - math.lgamma(float(n_int)))
        ln_coefs = np.array(_integer_log_coefs(n_int, am, s))
        lnsum = _k.poly_lnsum_eval(ln_coefs, np.log(xabs))
        return ln_pre + lnsum - lp * xabs

    c = am
    d = ap - 1.0
    b = c + d + 1.0
    z = s * xabs
    const = (ap * math.log(lp) + am * math.log(lm) - am * math.log(s)
             - math.lgamma(ap) - math.lgamma(am))
    base = const + (ap - 1.0) * np.log(xabs) - lp * xabs

    safe_small = abs(b - round(b)) > 1e-6
    extreme = (c >= 100.0) or (c + d >= 100.0)
    zmin = float(z.min())
    zmax = float(z.max())
    u0 = math.log(zmin) - 1e-9
    u1 = math.log(zmax) + 1e-9
    ngrid = int(min(4096, max(16, (u1 - u0) / 0.02 + 8)))

    if n <= 8 or (u1 - u0) < 0.05 or extreme:
        ln_j = np.array([_lnj_point(c, d, float(zi), policy) for zi in z])
        return base + ln_j

    du = (u1 - u0) / (ngrid - 1)
    zgrid = np.exp(u0 + du * np.arange(ngrid))
    tab = np.empty(ngrid)
    big = zgrid >= 0.5
    if big.any():
        tab[big] = _k.lnj_grid_eval(c, d, np.ascontiguousarray(zgrid[big]))
    if (~big).any():
        small_nodes = zgrid[~big]
        vals = np.empty(small_nodes.shape[0])
        for i, zi in enumerate(small_nodes):
            if safe_small:
                lnw, status = _k.lnw_small_z(c, d, float(zi))
                if status == 0:
                    vals[i] = lnw + math.lgamma(c)
                    continue
            vals[i] = _lnj_point(c, d, float(zi), policy)
        tab[~big] = vals
    ln_j = _k.cubic_eval(u0, du, tab, np.log(z))
    return base + ln_j


def batch_log_pdf(params, data, policy=DEFAULT_POLICY):
    """ln f at every point of ``data`` (zeros excluded; see loglik)."""
    p = as_params(params)
    x = np.asarray(data, dtype=float)
    out = np.empty(x.shape[0])
    pos = x > 0
    neg = x < 0
    out[pos] = _side_logpdf(np.ascontiguousarray(x[pos]), p.alpha_plus,
                            p.lambda_plus, p.alpha_minus, p.lambda_minus,
                            policy)
    out[neg] = _side_logpdf(np.ascontiguousarray(-x[neg]), p.alpha_minus,
                            p.lambda_minus, p.alpha_plus, p.lambda_plus,
                            policy)
    if (~(pos | neg)).any():
        if p.alpha_sum <= 1.0:
            raise DomainError("data contains exact zeros where the density "
                              "has a pole; loglik handles these by perturbation")
        out[~(pos | neg)] = _log_pdf_at_zero(p)
    return out


def loglik(params, data, policy=DEFAULT_POLICY):
    """Sum of ln f over the sample.

    Exact zeros, where the density has a pole (alpha+ + alpha- <= 1), are
    perturbed to +1e-12 times the data scale; the perturbation is reported
    through a warning.
    """
    p = as_params(params)
    x = np.asarray(data, dtype=float)
    if x.size == 0:
        raise DomainError("loglik requires nonempty data")
    if not np.all(np.isfinite(x)):
        raise DomainError("loglik requires finite data")
    if p.alpha_sum <= 1.0:
        zeros = x == 0.0
        if zeros.any():
            scale_ = float(np.max(np.abs(x)))
            if scale_ == 0.0:
                scale_ = 1.0
            warnings.warn(
                f"{int(zeros.sum())} exact zero(s) perturbed to "
                f"{1e-12 * scale_:g} (density pole at 0)")
            x = np.where(zeros, 1e-12 * scale_, x)
    return float(np.sum(batch_log_pdf(p, x, policy)))


# ----------------------------------------------------------------------
# fitting
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    params: BgParams
    log_likelihood: float
    iterations: int
    converged: bool
    init_params: BgParams


def moment_match_init(data):
    """Heuristic starting point: split the sample variance between the two
    Gamma components according to the skewness sign, then match each side's
    mean/variance.  Deterministic; output clamped to [1e-3, 1e4]."""
    x = np.asarray(data, dtype=float)
    if x.size < 4:
        raise FitError(f"need at least 4 points, got {x.size}")
    m = float(np.mean(x))
    v = float(np.var(x))
    if not v > 0:
        raise FitError("degenerate data: zero sample variance")
    g = float(np.mean((x - m) ** 3)) / v**1.5
    p_share = min(max(0.5 + 0.15 * math.copysign(min(1.0, abs(g)), g)
                      if g != 0 else 0.5, 0.05), 0.95)
    v_pos = v * p_share
    v_neg = v * (1.0 - p_share)
    mu_pos = math.sqrt(v_pos) + max(m, 0.0)
    mu_neg = math.sqrt(v_neg) + max(-m, 0.0)
    lo, hi = _INIT_CLAMP
    vals = [mu_pos**2 / v_pos, mu_pos / v_pos, mu_neg**2 / v_neg, mu_neg / v_neg]
    return BgParams(*(min(max(v_, lo), hi) for v_ in vals))


def _nelder_mead(fun, x0, step, diam_tol, max_iter):
    """Derivative-free simplex minimization; convergence when the simplex
    infinity-norm diameter drops below diam_tol.  Deterministic."""
    nd = x0.shape[0]
    sim = [np.array(x0)]
    for i in range(nd):
        v = np.array(x0)
        v[i] += step
        sim.append(v)
    fs = [fun(v) for v in sim]
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        order = np.argsort(fs, kind="stable")
        sim = [sim[i] for i in order]
        fs = [fs[i] for i in order]
        diam = max(float(np.max(np.abs(sim[j] - sim[0])))
                   for j in range(1, nd + 1))
        if diam <= diam_tol:
            converged = True
            break
        cen = np.mean(sim[:-1], axis=0)
        xr = cen + (cen - sim[-1])
        fr = fun(xr)
        if fr < fs[0]:
            xe = cen + 2.0 * (cen - sim[-1])
            fe = fun(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        else:
            xc = cen + 0.5 * (sim[-1] - cen)
            fc = fun(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
            else:
                for j in range(1, nd + 1):
                    sim[j] = sim[0] + 0.5 * (sim[j] - sim[0])
                    fs[j] = fun(sim[j])
    return sim[0], fs[0], it, converged


def fit_mle(data, init=None, rng=None, policy=DEFAULT_POLICY,
            n_starts=5, spread=0.5, diam_tol=1e-8, max_iter=2000):
    """Maximum-likelihood fit over log-parameters with a multi-start
    Nelder-Mead simplex.

    Starts: the moment-match initializer (or ``init``) plus n_starts - 1
    log-space Gaussian perturbations of the given spread, seeded from
    ``rng``.  A start converges when the simplex diameter in log-parameter
    space falls below diam_tol (else stops at max_iter).  The best
    converged start wins (ties budget to the smallest start index); if no
    start converges the best non-converged result is returned with
    converged=False rather than raising.
    """
    x = np.asarray(data, dtype=float)
    if x.size < 20:
        raise FitError(f"need at least 20 data points, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("fit_mle requires finite data")
    if rng is None:
        rng = RngState(0)
    init_params = as_params(init) if init is not None else moment_match_init(x)

    zeros = x == 0.0
    if zeros.any():
        scale_ = float(np.max(np.abs(x))) or 1.0
        warnings.warn(f"{int(zeros.sum())} exact zero(s) perturbed for fitting")
        x = np.where(zeros, 1e-12 * scale_, x)
    xpos = np.ascontiguousarray(x[x > 0])
    xneg = np.ascontiguousarray(-x[x < 0])

    def neg_ll(theta):
        if np.max(np.abs(theta)) > 16.0:
            return 1e300
        ap, lp, am, lm = np.exp(theta)
        try:
            v = (float(np.sum(_side_logpdf(xpos, ap, lp, am, lm, policy)))
                 + float(np.sum(_side_logpdf(xneg, am, lm, ap, lp, policy))))
        except (EvaluationError, DomainError, OverflowError):
            return 1e300
        return -v if math.isfinite(v) else 1e300

    theta0 = np.log(np.array(init_params.astuple()))
    starts = [theta0]
    for child in rng.spawn(n_starts - 1):
        starts.append(theta0 + spread * child.generator.standard_normal(4))

    best = None
    for idx, th in enumerate(starts):
        th_opt, f_opt, iters, conv = _nelder_mead(neg_ll, th, 0.25,
                                                  diam_tol, max_iter)
        cand = (conv, -f_opt, -idx)  # prefer converged, then likelihood, then low index
        if best is None or cand > best[0]:
            best = (cand, th_opt, f_opt, iters, conv)

    _, th_opt, f_opt, iters, conv = best
    fitted = BgParams(*np.exp(th_opt))
    return FitResult(params=fitted, log_likelihood=-f_opt, iterations=iters,
                     converged=conv, init_params=init_params)
