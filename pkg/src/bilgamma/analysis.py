"""Qualitative and asymptotic structure of the density: smoothness index,
mode location, behaviour near zero, tail constants, shape taxonomy, and
the integro-differential identity residual."""

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from scipy.integrate import quad

from .density import pdf, pdf_derivative
from .errors import DomainError, EvaluationError
from .params import as_params, is_near_integer
from .policy import DEFAULT_POLICY

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _snap_sum(asum):
    r = round(asum)
    if abs(asum - r) <= 1e-12 and r >= 1:
        return float(r)
    return asum


def smoothness_class(params):
    """Smoothness index N: the unique integer with N < alpha+ + alpha- <= N+1.

    f has N continuous derivatives away from zero but f^(N) is
    discontinuous at zero, i.e. f is C^(N-1) on all of R and not C^N.
    """
    p = as_params(params)
    return int(math.ceil(_snap_sum(p.alpha_sum))) - 1


@dataclass(frozen=True)
class ModeResult:
    x0: float
    bracket: Tuple[float, float]

    def __contains__(self, x):
        return self.bracket[0] <= x <= self.bracket[1]


def _golden_max(f, lo, hi, rel_width):
    """Golden-section maximization of a strictly unimodal f on (lo, hi)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = f(c)
    fd = f(d)
    tol = rel_width * (hi - lo)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _parabolic_polish(f, m, lo, hi, width):
    """One parabolic-vertex step around m; guards against degenerate curvature."""
    delta = 1e-5 * width
    if m - delta <= lo or m + delta >= hi:
        return m
    f0 = f(m)
    fp = f(m + delta)
    fm = f(m - delta)
    denom = fp - 2.0 * f0 + fm
    if denom >= 0.0 or not math.isfinite(denom):
        return m
    shift = -0.5 * delta * (fp - fm) / denom
    if abs(shift) > delta or not math.isfinite(shift):
        return m
    return m - shift


def mode(params, policy=DEFAULT_POLICY):
    """Location of the unique density maximum, with the analytic bracket.

    * both shapes <= 1: the mode is exactly 0;
    * alpha+ > 1 >= alpha-: mode in (0, (alpha+ - 1)/lambda+);
    * both > 1: mode in (-(alpha- - 1)/lambda-, (alpha+ - 1)/lambda+), with
      the sign (or exact zero) decided by the trichotomy on
      lm*ap - lp*am vs lm - lp.

    Interior modes are located by golden-section search on the density
    (valid under strict unimodality, no derivative needed) followed by a
    guarded parabolic refinement.
    """
    p = as_params(params)
    ap, lp, am, lm = p.astuple()
    f = lambda x: pdf(p, x, policy)
    if ap <= 1.0 and am <= 1.0:
        return ModeResult(0.0, (0.0, 0.0))
    hi = (ap - 1.0) / lp if ap > 1.0 else 0.0
    lo = -(am - 1.0) / lm if am > 1.0 else 0.0
    if ap > 1.0 and am <= 1.0:
        m = _golden_max(f, 0.0, hi, 1e-10)
        m = _parabolic_polish(f, m, 0.0, hi, hi)
        return ModeResult(m, (0.0, hi))
    if am > 1.0 and ap <= 1.0:
        inner = mode(p.swapped(), policy)
        return ModeResult(-inner.x0, (lo, 0.0))
    # both shapes > 1: sign rule first
    disc = lm * ap - lp * am - (lm - lp)
    scale = max(1.0, abs(lm * ap), abs(lp * am), abs(lm - lp))
    if abs(disc) <= 1e-12 * scale:
        return ModeResult(0.0, (lo, hi))
    if disc > 0:
        m = _golden_max(f, 0.0, hi, 1e-10)
        m = _parabolic_polish(f, m, 0.0, hi, hi)
    else:
        m = -_golden_max(lambda x: f(-x), 0.0, -lo, 1e-10)
        m = _parabolic_polish(f, m, lo, 0.0, -lo)
    return ModeResult(m, (lo, hi))


class NearZeroTag(enum.Enum):
    FINITE_LIMIT = "FiniteLimit"
    POWER_DIVERGENCE = "PowerDivergence"
    SLOWLY_VARYING_DIVERGENCE = "SlowlyVaryingDivergence"


@dataclass(frozen=True)
class NearZeroClass:
    """Behaviour of f^(N) as x tends to 0 from the right.

    * FiniteLimit when alpha+ is a positive integer;
    * PowerDivergence ~ c1 / x^alpha_exp when neither alpha+ nor the shape
      sum is an integer, alpha_exp = N + 1 - alpha+ - alpha- in (0, 1);
    * SlowlyVaryingDivergence when the shape sum is an integer but alpha+
      is not: f^(N) diverges slowly-varying, while the two-sided difference
      f^(N)(x) - f^(N)(-x) tends to the finite constant c2.
    """

    tag: NearZeroTag
    alpha_exp: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None


def near_zero_class(params):
    """Classification of the positive-side x -> 0 behaviour of f^(N)."""
    p = as_params(params)
    ap, lp, am, lm = p.astuple()
    if is_near_integer(ap):
        return NearZeroClass(NearZeroTag.FINITE_LIMIT)
    asum = _snap_sum(p.alpha_sum)
    n_idx = int(math.ceil(asum)) - 1
    rate_pow = lp**ap * lm**am
    if asum == round(asum):
        c2 = 0.5 * rate_pow * ((-1.0) ** (n_idx + 1) * math.cos(ap * math.pi)
                               + math.cos(am * math.pi))
        return NearZeroClass(NearZeroTag.SLOWLY_VARYING_DIVERGENCE, c2=c2)
    alpha_exp = n_idx + 1.0 - asum
    c1 = rate_pow * math.sin(ap * math.pi) / (
        math.gamma(asum - n_idx) * math.sin(asum * math.pi))
    return NearZeroClass(NearZeroTag.POWER_DIVERGENCE,
                         alpha_exp=alpha_exp, c1=c1)


def tail_constants(params):
    """(C3, C4) of the semiheavy-tail laws
    f(x) ~ C3 x^(ap-1) e^(-lp x) (x -> +inf),
    f(x) ~ C4 |x|^(am-1) e^(-lm |x|) (x -> -inf)."""
    p = as_params(params)
    ap, lp, am, lm = p.astuple()
    s = lp + lm
    c3 = math.exp(ap * math.log(lp) + am * math.log(lm)
                  - am * math.log(s) - math.lgamma(ap))
    c4 = math.exp(ap * math.log(lp) + am * math.log(lm)
                  - ap * math.log(s) - math.lgamma(am))
    return c3, c4


def log_tail_slopes(params):
    """Limits of ln f(x)/x at +inf and -inf: (-lambda+, lambda-)."""
    p = as_params(params)
    return -p.lambda_plus, p.lambda_minus


class Taxonomy(enum.Enum):
    POLE = "Pole"
    STEEP_CUSP = "SteepCusp"
    OFFSET_INFINITE_SLOPE = "OffsetInfiniteSlope"
    EXPONENTIAL_PEAK = "ExponentialPeak"
    SMOOTH = "Smooth"


@dataclass(frozen=True)
class ShapeReport:
    smoothness_n: int
    mode: float
    mode_bracket: Tuple[float, float]
    taxonomy: Taxonomy
    near_zero_pos: NearZeroClass
    near_zero_neg: NearZeroClass
    tail_exponents: Tuple[float, float]
    tail_rates: Tuple[float, float]
    tail_constants: Tuple[float, float]


def _classify(p):
    asum = _snap_sum(p.alpha_sum)
    ap, am = p.alpha_plus, p.alpha_minus
    if asum <= 1.0:
        return Taxonomy.POLE
    if asum > 2.0:
        return Taxonomy.SMOOTH
    one_p = is_near_integer(ap) and round(ap) == 1
    one_m = is_near_integer(am) and round(am) == 1
    if one_p and one_m:
        return Taxonomy.EXPONENTIAL_PEAK
    if max(ap, am) > 1.0:
        # one side's shape exceeds 1: mode moves off zero, the other side
        # still has infinite slope at zero (mirrored case included)
        return Taxonomy.OFFSET_INFINITE_SLOPE
    return Taxonomy.STEEP_CUSP


def shape_report(params, policy=DEFAULT_POLICY):
    """Aggregate shape description: smoothness index, mode with bracket,
    near-zero classes of both sides, tail data, and the qualitative
    taxonomy (pole / steep cusp / offset infinite slope / exponential
    peak / smooth).  The boundary case alpha+ + alpha- = 1 stays in the
    pole class; its near-zero c2 annotation carries the finite two-sided
    difference limit."""
    p = as_params(params)
    m = mode(p, policy)
    c3, c4 = tail_constants(p)
    return ShapeReport(
        smoothness_n=smoothness_class(p),
        mode=m.x0,
        mode_bracket=m.bracket,
        taxonomy=_classify(p),
        near_zero_pos=near_zero_class(p),
        near_zero_neg=near_zero_class(p.swapped()),
        tail_exponents=(p.alpha_plus - 1.0, p.alpha_minus - 1.0),
        tail_rates=(p.lambda_plus, p.lambda_minus),
        tail_constants=(c3, c4),
    )


def integro_diff_residual(params, x, policy=DEFAULT_POLICY):
    """Residual of the integro-differential identity satisfied by f:

        x f'(x) - (ap + am - 1) f(x)
        + ap lp int_0^inf f(x-u) e^(-lp u) du
        + am lm int_0^inf f(x+u) e^(-lm u) du

    which vanishes identically; |residual| <= 1e-5 * max(1, |x f'(x)|)
    certifies the identity numerically.
    """
    p = as_params(params)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError(f"requires finite x != 0, got {x!r}")
    if p.alpha_sum <= 1.0:
        raise DomainError("requires alpha+ + alpha- > 1")
    ap, lp, am, lm = p.astuple()
    f = lambda t: pdf(p, t, policy)

    def integrate(g, singular_at):
        # split the half-line at the density kink and at a few decay scales
        pieces = []
        cuts = sorted({0.0, singular_at, singular_at + 1.0,
                       singular_at + 10.0} | {1.0, 10.0})
        cuts = [c for c in cuts if c >= 0.0]
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= a:
                continue
            val, err = quad(g, a, b, epsabs=1e-12, epsrel=1e-11, limit=300)
            total += val
            pieces.append(err)
        val, err = quad(g, cuts[-1], math.inf, epsabs=1e-12, epsrel=1e-11,
                        limit=300)
        total += val
        if max(pieces + [err]) > 1e-7:
            raise EvaluationError("residual convolution quadrature failure",
                                  detail={"errors": pieces + [err]})
        return total

    i_plus = integrate(lambda u: f(x - u) * math.exp(-lp * u),
                       singular_at=max(x, 0.0))
    i_minus = integrate(lambda u: f(x + u) * math.exp(-lm * u),
                        singular_at=max(-x, 0.0))
    return (x * pdf_derivative(p, x, policy) - (ap + am - 1.0) * f(x)
            + ap * lp * i_plus + am * lm * i_minus)
