"""Acceptance gate: one test (or small test group) per criterion, each at
its stated tolerance, printing a PASS line (visible with ``pytest -s``).

Three sub-checks are mathematically unattainable exactly as stated and are
marked xfail(strict=True) with the measured values in the reason; each has
a passing companion at a point where the same asymptotic statement holds
within the stated tolerance.  See the package README for the analysis.
"""

import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

from bilgamma import (BgParams, RngState, cdf, fit_mle, integro_diff_residual,
                      log_pdf, loglik, mode, moments, near_zero_class, pdf,
                      quantile, sample, smoothness_class, tail_constants,
                      vg_params, vg_pdf)
from bilgamma.oracle import (mc_moment_oracle, pdf_fft_oracle,
                             pdf_quadrature_oracle)

CRITERION_SETS = [(1, 1, 1, 1), (2, 1, 1, 1), (3, 2, 0.5, 1), (0.5, 1, 0.5, 1),
                  (1.55, 133.96, 0.94, 88.92), (0.7, 2, 1.3, 3)]


def report(num, text):
    print(f"\n[criterion {num:>2}] PASS: {text}")


def oracle_pdf(p, x):
    return pdf_quadrature_oracle(p, x) if x > 0 else \
        pdf_quadrature_oracle(p.swapped(), -x)


def random_sets(n, seed, min_sum=None, min_alpha=None):
    gen = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        v = np.exp(gen.uniform(np.log(0.2), np.log(5.0), 4))
        if min_sum is not None and v[0] + v[2] <= min_sum:
            continue
        if min_alpha is not None and not (v[0] > min_alpha and v[2] > min_alpha):
            continue
        out.append(BgParams(*v))
    return out


# ----------------------------------------------------------------- 1

def test_criterion_01_representation_agreement():
    worst = 0.0
    for ps in CRITERION_SETS:
        p = BgParams(*ps)
        sd = math.sqrt(moments(p).variance)
        grid = np.geomspace(0.02 * sd, 4.0 * sd, 11)
        for x in np.concatenate([-grid[::-1], grid]):
            ref = oracle_pdf(p, float(x))
            rel = abs(pdf(p, float(x)) - ref) / ref
            worst = max(worst, rel)
            assert rel <= 1e-7, (ps, x, rel)
    report(1, f"pdf vs quadrature oracle on 6 sets x 22 points, "
              f"worst rel err {worst:.2e} <= 1e-7")


# ----------------------------------------------------------------- 2

def test_criterion_02_laplace_exactness():
    p = BgParams(1, 1, 1, 1)
    worst = 0.0
    for x in np.linspace(-8, 8, 50):
        ref = 0.5 * math.exp(-abs(x))
        rel = abs(pdf(p, float(x)) - ref) / ref
        worst = max(worst, rel)
        assert rel <= 1e-12
    report(2, f"pdf(1,1,1,1) vs half-exponential on 50 points, "
              f"worst rel err {worst:.2e} <= 1e-12")


# ----------------------------------------------------------------- 3

def test_criterion_03_normalization():
    t0 = time.time()
    worst = 0.0
    for p in random_sets(50, seed=1003, min_sum=1.0):
        total = 0.0
        for a, b in [(-40.0 / p.lambda_minus, 0.0), (0.0, 40.0 / p.lambda_plus)]:
            total += quad(lambda t: pdf(p, t), a, b,
                          epsabs=1e-10, epsrel=1e-9, limit=400)[0]
        worst = max(worst, abs(total - 1.0))
        assert abs(total - 1.0) <= 1e-7
    dt = time.time() - t0
    assert dt < 60.0
    report(3, f"50 random normalizations within {worst:.2e} of 1 "
              f"(<= 1e-7) in {dt:.1f}s")


# ----------------------------------------------------------------- 4

def test_criterion_04_vg_equivalence():
    worst = 0.0
    for a, lp, lm in [(0.5, 1.0, 2.0), (1.0, 2.0, 3.0), (2.5, 1.5, 0.8)]:
        p = BgParams(a, lp, a, lm)
        vp = vg_params(p)
        sd = math.sqrt(moments(p).variance)
        for x in np.linspace(-2.5 * sd, 2.5 * sd, 21):
            if x == 0.0:
                continue
            rel = abs(vg_pdf(vp, float(x)) - pdf(p, float(x))) / pdf(p, float(x))
            worst = max(worst, rel)
            assert rel <= 1e-8
    report(4, f"Variance-Gamma equivalence on 3 alpha values x 20 points, "
              f"worst rel err {worst:.2e} <= 1e-8")


# ----------------------------------------------------------------- 5

def test_criterion_05_fft_inversion():
    worst = 0.0
    for ps in CRITERION_SETS:
        p = BgParams(*ps)
        if p.alpha_sum <= 1.0:
            continue
        xs, fs = pdf_fft_oracle(p, grid_size=1 << 16)
        lo = quantile(p, 0.005)
        hi = quantile(p, 0.995)
        sel = np.where((xs >= lo) & (xs <= hi))[0]
        for i in sel[:: max(1, sel.size // 80)]:
            err = abs(fs[i] - pdf(p, float(xs[i])))
            worst = max(worst, err)
            assert err <= 1e-5, (ps, xs[i], err)
    report(5, f"FFT inversion vs pdf on central 99% regions, "
              f"worst abs err {worst:.2e} <= 1e-5")


# ----------------------------------------------------------------- 6

MC_SETS = [(1, 1, 1, 1), (2, 1, 1, 1), (3, 2, 0.5, 1), (0.5, 1, 0.5, 1),
           (1.55, 133.96, 0.94, 88.92), (0.7, 2, 1.3, 3), (2, 5, 3, 7),
           (0.3, 0.8, 2.2, 1.1), (4.5, 2.5, 0.25, 0.9), (1.2, 0.4, 0.9, 3.3)]


def test_criterion_06_monte_carlo_moments():
    rng = RngState(20250809)
    worst = 0.0
    for ps in MC_SETS:
        p = BgParams(*ps)
        m = moments(p)
        mc = mc_moment_oracle(p, 10**6, rng)
        sig = max(abs(mc.mean - m.mean) / mc.se_mean,
                  abs(mc.variance - m.variance) / mc.se_variance,
                  abs(mc.skewness - m.skewness) / mc.se_skewness,
                  abs(mc.kurtosis - m.kurtosis) / mc.se_kurtosis)
        worst = max(worst, sig)
        assert sig <= 3.0, (ps, sig)
    report(6, f"closed-form moments vs n=1e6 Monte Carlo on 10 sets, "
              f"worst deviation {worst:.2f} jackknife sigmas (<= 3)")


# ----------------------------------------------------------------- 7

def test_criterion_07_mode_results():
    assert mode((1, 1, 1, 1)).x0 == 0.0
    m2 = mode((2, 1, 1, 1)).x0
    assert m2 == pytest.approx(0.5, abs=1e-8)
    n_zero = 0
    for p in random_sets(100, seed=1007, min_alpha=1.0):
        r = mode(p)
        disc = (p.lambda_minus * p.alpha_plus - p.lambda_plus * p.alpha_minus
                - (p.lambda_minus - p.lambda_plus))
        if abs(disc) <= 1e-12:
            assert r.x0 == 0.0
            n_zero += 1
        elif disc > 0:
            assert r.x0 > 0.0
        else:
            assert r.x0 < 0.0
        lo = -(p.alpha_minus - 1.0) / p.lambda_minus
        hi = (p.alpha_plus - 1.0) / p.lambda_plus
        assert lo <= r.x0 <= hi
    for p in random_sets(50, seed=1008, min_sum=1.0):
        r = mode(p)
        span = 2.5 / min(p.lambda_plus, p.lambda_minus)
        left = [pdf(p, float(x)) for x in
                np.linspace(r.x0 - span, r.x0 - 1e-7 * span, 20)]
        right = [pdf(p, float(x)) for x in
                 np.linspace(r.x0 + 1e-7 * span, r.x0 + span, 20)]
        assert all(b > a for a, b in zip(left, left[1:]))
        assert all(b < a for a, b in zip(right, right[1:]))
    report(7, f"mode(2,1,1,1) = {m2!r} (0.5 +- 1e-8); trichotomy and bracket "
              f"on 100 random sets; unimodality grid on 50 sets")


# ----------------------------------------------------------------- 8

SMOOTHNESS_TABLE = [
    ((0.5, 1, 0.3, 1), 0), ((0.4, 2, 0.4, 1), 0), ((0.5, 1, 0.5, 2), 0),
    ((0.7, 1, 0.9, 1), 1), ((1.0, 1, 1.0, 1), 1), ((0.5, 1, 1.5, 2), 1),
    ((1.3, 1, 1.2, 1), 2), ((1.5, 1, 1.5, 1), 2),
    ((1.55, 133.96, 0.94, 88.92), 2), ((2.2, 1, 1.4, 1), 3),
    ((0.7, 1, 1.3, 1), 1), ((3.0, 1, 2.5, 1), 5),
]


def test_criterion_08_smoothness_index_and_witnesses():
    for ps, n in SMOOTHNESS_TABLE:
        assert smoothness_class(ps) == n, ps
    # divergence witness, shape sum <= 1: pole at zero
    for ps in [(0.3, 1, 0.3, 1), (0.2, 1, 0.5, 2), (0.25, 2, 0.35, 0.8)]:
        p = BgParams(*ps)
        assert pdf(p, 1e-8) > 1e3 * pdf(p, 1.0)
    # both shapes < 1, 1 < sum < 2: two-sided exploding slope
    for ps in [(0.6, 1, 0.6, 1), (0.55, 1, 0.75, 2)]:
        p = BgParams(*ps)
        h = 5e-7
        right = (pdf(p, 1e-6 + h) - pdf(p, 1e-6 - h)) / (2 * h)
        left = (pdf(p, -1e-6 + h) - pdf(p, -1e-6 - h)) / (2 * h)
        assert right < -1e3 and left > 1e3
    report(8, "smoothness index on 12-set table (boundary sums 1,2,3) and "
              "divergence witnesses")


# ----------------------------------------------------------------- 9

def test_criterion_09_near_zero_slope():
    p = BgParams(0.5, 1, 0.3, 1)
    xs = np.geomspace(1e-8, 1e-5, 20)
    ly = np.log([oracle_pdf(p, float(x)) for x in xs])
    slope = np.polyfit(np.log(xs), ly, 1)[0]
    assert slope == pytest.approx(-0.2, abs=0.01)
    report(9, f"log-log oracle slope on [1e-8,1e-5] = {slope:.4f} "
              f"(-0.2 +- 0.01)")


@pytest.mark.xfail(
    strict=True,
    reason="stated tolerance is unattainable: the subleading term of the "
           "small-argument expansion contributes -0.751*(2x)^0.2 = -2.17% "
           "at x=1e-8 (measured ratio 0.97832), outside +-1%. The same "
           "check passes at x=1e-12; see the companion test.")
def test_criterion_09_c1_level_at_1e8_as_stated():
    p = BgParams(0.5, 1, 0.3, 1)
    nz = near_zero_class(p)
    x = 1e-8
    level = oracle_pdf(p, x) * x ** nz.alpha_exp
    assert level == pytest.approx(nz.c1, rel=0.01)


def test_criterion_09_c1_level_companion_at_1e12():
    p = BgParams(0.5, 1, 0.3, 1)
    nz = near_zero_class(p)
    x = 1e-12
    level = oracle_pdf(p, x) * x ** nz.alpha_exp
    assert level == pytest.approx(nz.c1, rel=0.01)
    report(9, f"C1 level at x=1e-12: {level:.6f} vs {nz.c1:.6f} (+-1%); "
              f"the stated x=1e-8 point is off by 2.17% (expected-fail)")


def test_criterion_09_c2_cases():
    # symmetric integer-sum case: C2 == 0 and the difference is identically 0
    p_sym = BgParams(0.5, 1, 0.5, 1)
    nz = near_zero_class(p_sym)
    assert nz.c2 == pytest.approx(0.0, abs=1e-15)
    for x in (1e-8, 1e-5):
        assert pdf(p_sym, x) - pdf(p_sym, -x) == 0.0
    # asymmetric sum == 1 case against the quadrature oracle
    p = BgParams(0.7, 1, 0.3, 2)
    nz = near_zero_class(p)
    x = 1e-8
    diff = oracle_pdf(p, x) - oracle_pdf(p, -x)
    assert diff == pytest.approx(nz.c2, rel=0.01)
    report(9, f"C2 difference limit: symmetric 0 exact; asymmetric "
              f"{diff:.6f} vs {nz.c2:.6f} (+-1%)")


# ----------------------------------------------------------------- 10

# measured truth at x = 30/rate (40-digit mpmath through an independent
# Whittaker route); entries outside the stated windows are spec defects
RATIO_XFAIL = {((2, 1, 1, 1), "+"): 1.01667,
               ((3, 2, 0.5, 1), "+"): 1.02259,
               ((3, 2, 0.5, 1), "-"): 0.98386,
               ((1.55, 133.96, 0.94, 88.92), "+"): 1.01027}

SIDES = [(ps, side) for ps in CRITERION_SETS for side in ("+", "-")]
IDS = [f"{ps}{side}" for ps, side in SIDES]


def _tail_point(ps, side):
    p = BgParams(*ps)
    c3, c4 = tail_constants(p)
    if side == "+":
        rate, shp, const = p.lambda_plus, p.alpha_plus, c3
    else:
        rate, shp, const = p.lambda_minus, p.alpha_minus, c4
    return p, rate, shp, const


@pytest.mark.parametrize("ps,side", SIDES, ids=IDS)
def test_criterion_10_tail_ratio_as_stated(ps, side, request):
    if (ps, side) in RATIO_XFAIL:
        request.applymarker(pytest.mark.xfail(
            strict=True,
            reason=f"measured ratio {RATIO_XFAIL[(ps, side)]} at x=30/rate is "
                   "outside [0.99, 1.01]: the H-series correction c*d/z is "
                   "not inside the stated tolerance at that point "
                   "(passes at x=1000/rate; see companion)"))
    p, rate, shp, const = _tail_point(ps, side)
    x = 30.0 / rate
    fx = pdf(p, x if side == "+" else -x)
    ratio = fx / (const * x ** (shp - 1.0) * math.exp(-rate * x))
    assert 0.99 <= ratio <= 1.01


@pytest.mark.parametrize("ps,side", SIDES, ids=IDS)
@pytest.mark.xfail(
    strict=True,
    reason="(ln f(x))/x at x=30/rate is 2.3%-21% away from the tail rate "
           "for every criterion-1 set (even the pure Laplace case gives "
           "ln(1/2)/30 = 2.31%); the 2% window is unattainable at that x. "
           "Passes for all sets at x=1000/rate; see companion.")
def test_criterion_10_log_slope_as_stated(ps, side):
    p, rate, shp, const = _tail_point(ps, side)
    x = 30.0 / rate
    slope = log_pdf(p, x if side == "+" else -x) / x
    assert abs(slope + rate) <= 0.02 * rate


@pytest.mark.parametrize("ps,side", SIDES, ids=IDS)
def test_criterion_10_companion_at_1000_over_rate(ps, side):
    p, rate, shp, const = _tail_point(ps, side)
    x = 1000.0 / rate
    lf = log_pdf(p, x if side == "+" else -x)
    ratio = math.exp(lf - (math.log(const) + (shp - 1.0) * math.log(x)
                           - rate * x))
    assert 0.99 <= ratio <= 1.01
    assert abs(lf / x + rate) <= 0.02 * rate


def test_criterion_10_report():
    report(10, "tail constants and log-slope limits verified at x=1000/rate "
               "on all 6 sets, both sides; the literal x=30/rate checks are "
               "expected-fail with measured values in the xfail reasons")


# ----------------------------------------------------------------- 11

def test_criterion_11_integro_differential_identity():
    worst = 0.0
    for ps in [(2, 1, 1, 1), (1, 1, 1, 1)]:
        for x in (0.5, 1.0, 2.0, -0.5, -1.0, -2.0):
            r = abs(integro_diff_residual(ps, x))
            worst = max(worst, r)
            assert r <= 1e-5, (ps, x, r)
    report(11, f"integro-differential residual at 12 points, "
               f"worst |residual| {worst:.2e} <= 1e-5")


# ----------------------------------------------------------------- 12

def test_criterion_12_fit_round_trip():
    t0 = time.time()
    results = []
    for ps, dseed, fseed in [((1.55, 133.96, 0.94, 88.92), 101, 202),
                             ((1, 1, 1, 1), 103, 204)]:
        p = BgParams(*ps)
        data = sample(p, 10**5, RngState(dseed))
        res = fit_mle(data, rng=RngState(fseed))
        assert res.converged
        assert res.log_likelihood >= loglik(res.init_params, data)
        rels = [abs(g - w) / w
                for g, w in zip(res.params.astuple(), p.astuple())]
        assert max(rels) < 0.10, (ps, rels)
        results.append(max(rels))
    dt = time.time() - t0
    assert dt < 300.0
    report(12, f"both 1e5-sample round trips converged, worst parameter "
               f"error {max(results):.1%} (< 10%), total {dt:.0f}s (< 5 min)")


# ----------------------------------------------------------------- 13

def _cli(*argv, stdin=None):
    return subprocess.run([sys.executable, "-m", "bilgamma.cli", *argv],
                          capture_output=True, text=True, input=stdin,
                          cwd=Path(__file__).parent.parent,
                          env={**os.environ})


def test_criterion_13_cli_determinism_and_verify_exit():
    # byte-identical stdout for identical argv+seed (golden files for all
    # subcommands live in test_cli.py)
    for argv in (["pdf", "--params", "1.55,133.96,0.94,88.92", "--x", "0.01"],
                 ["sample", "--params", "0.7,2,1.3,3", "--n", "32",
                  "--seed", "11"]):
        a = _cli(*argv)
        b = _cli(*argv)
        assert a.returncode == 0 and a.stdout == b.stdout
    # artificially tightened oracle threshold must exit nonzero (code 5)
    r = _cli("verify", "--mc-n", "20000", "--rel-threshold", "1e-30")
    assert r.returncode == 5
    assert any(not rep["passed"] for rep in json.loads(r.stdout))
    report(13, "CLI byte-determinism and verify exit-code contract "
               "(golden files for every subcommand in test_cli.py)")
