import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bilgamma import (BgParams, ContractViolationError, DomainError, cdf,
                      char_fn, convolve, k_fn, levy_density, moments, pdf,
                      quantile, sample, scale, vg_params, vg_pdf, RngState)

from conftest import random_param_sets

LAPLACE = BgParams(1, 1, 1, 1)
STOCK = BgParams(1.55, 133.96, 0.94, 88.92)

pos_param = st.floats(0.2, 5.0)


class TestCharFn:
    def test_normalization(self):
        for ps in random_param_sets(5, seed=1):
            assert char_fn(ps, 0.0) == 1.0 + 0.0j

    def test_arithmetic_value(self):
        # (1/(1-i)) * (1/(1+i)) = 1/2
        assert char_fn(LAPLACE, 1.0) == pytest.approx(0.5 + 0.0j, abs=1e-15)

    def test_symmetric_law_real(self):
        p = BgParams(1.7, 2.2, 1.7, 2.2)
        for z in [0.3, 1.0, 8.0]:
            assert abs(char_fn(p, z).imag) < 1e-15

    @given(pos_param, pos_param, pos_param, pos_param, st.floats(-50, 50))
    def test_modulus_and_conjugacy(self, ap, lp, am, lm, z):
        p = BgParams(ap, lp, am, lm)
        v = char_fn(p, z)
        assert abs(v) <= 1.0 + 1e-12
        w = char_fn(p, -z)
        assert w == pytest.approx(v.conjugate(), rel=1e-12, abs=1e-12)


class TestLevyAndK:
    def test_levy_values(self):
        assert levy_density(LAPLACE, 1.0) == pytest.approx(math.exp(-1))
        assert levy_density((2, 3, 1, 1), -2.0) == pytest.approx(0.5 * math.exp(-2))

    def test_k_values(self):
        assert k_fn(LAPLACE, 1.0) == pytest.approx(math.exp(-1))
        assert k_fn(LAPLACE, -1.0) == pytest.approx(-math.exp(-1))

    def test_k_equals_x_times_levy(self):
        p = BgParams(1.3, 0.8, 2.1, 1.7)
        for x in [0.2, 1.5, -0.4, -3.0]:
            assert k_fn(p, x) == pytest.approx(x * levy_density(p, x), rel=1e-14)

    def test_k_monotone_each_halfline(self):
        p = BgParams(0.7, 1.4, 2.2, 0.3)
        pos = [k_fn(p, x) for x in np.linspace(0.01, 10, 100)]
        neg = [k_fn(p, x) for x in np.linspace(-10, -0.01, 100)]
        assert all(b < a for a, b in zip(pos, pos[1:]))
        assert all(b < a for a, b in zip(neg, neg[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            levy_density(LAPLACE, 0.0)
        with pytest.raises(DomainError):
            k_fn(LAPLACE, 0.0)


class TestMoments:
    def test_symmetric_point(self):
        m = moments(LAPLACE)
        assert (m.mean, m.variance, m.skewness, m.kurtosis) == \
            pytest.approx((0.0, 2.0, 0.0, 6.0))

    def test_stock_params_mean(self):
        m = moments(STOCK)
        assert m.mean == pytest.approx(1.55 / 133.96 - 0.94 / 88.92, rel=1e-14)

    @given(pos_param, pos_param)
    def test_symmetry_kills_skewness(self, a, lam):
        assert moments(BgParams(a, lam, a, lam)).skewness == 0.0

    def test_kurtosis_exceeds_three(self):
        for ps in random_param_sets(20, seed=2):
            assert moments(ps).kurtosis > 3.0


class TestScaleConvolve:
    def test_scale_rule(self):
        s = scale(LAPLACE, 2.0)
        assert s.astuple() == (1.0, 0.5, 1.0, 0.5)
        assert scale(LAPLACE, 1.0).astuple() == LAPLACE.astuple()

    def test_scale_charfn_identity(self):
        p = BgParams(1.3, 0.8, 2.1, 1.7)
        for c in [0.5, 3.0]:
            sp = scale(p, c)
            for z in [0.3, 2.0]:
                assert char_fn(sp, z) == pytest.approx(char_fn(p, c * z), rel=1e-13)

    def test_scale_domain(self):
        with pytest.raises(DomainError):
            scale(LAPLACE, 0.0)
        with pytest.raises(DomainError):
            scale(LAPLACE, -2.0)

    def test_convolution_closure(self):
        assert convolve(LAPLACE, LAPLACE).astuple() == (2.0, 1.0, 2.0, 1.0)

    def test_convolution_charfn_product(self):
        p1 = BgParams(0.7, 1.1, 1.9, 0.6)
        p2 = BgParams(1.4, 1.1, 0.3, 0.6)
        conv = convolve(p1, p2)
        for z in range(-3, 4):
            lhs = char_fn(conv, float(z))
            rhs = char_fn(p1, float(z)) * char_fn(p2, float(z))
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_tiny_shape_near_identity(self):
        tiny = BgParams(1e-6, 1.1, 1e-6, 0.6)
        p = BgParams(0.7, 1.1, 1.9, 0.6)
        conv = convolve(p, tiny)
        for z in [0.5, 2.0]:
            assert char_fn(conv, z) == pytest.approx(char_fn(p, z), rel=1e-4)

    def test_mismatched_rates(self):
        with pytest.raises(ContractViolationError):
            convolve(LAPLACE, BgParams(1, 2, 1, 1))


class TestCdf:
    def test_laplace_closed_form(self):
        for x in [0.0, 0.3, 1.0, 4.0]:
            assert cdf(LAPLACE, x) == pytest.approx(
                1 - 0.5 * math.exp(-x), abs=1e-11)
        for x in [-0.3, -2.0]:
            assert cdf(LAPLACE, x) == pytest.approx(
                0.5 * math.exp(x), abs=1e-11)

    def test_symmetric_median(self):
        p = BgParams(0.8, 1.3, 0.8, 1.3)
        assert cdf(p, 0.0) == pytest.approx(0.5, abs=1e-9)

    def test_monotone_with_limits(self):
        p = BgParams(0.7, 2.0, 1.3, 3.0)
        xs = np.linspace(-8, 8, 60)
        vals = [cdf(p, float(x)) for x in xs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[0] < 1e-6 and vals[-1] > 1 - 1e-6
        assert cdf(p, math.inf) == 1.0 and cdf(p, -math.inf) == 0.0

    def test_stock_against_monte_carlo(self):
        # empirical CDF of 1e7 sampler draws, +-3 binomial standard errors
        n = 10**7
        draws = sample(STOCK, n, RngState(2024))
        x0 = 0.005
        emp = float(np.mean(draws <= x0))
        se = math.sqrt(emp * (1 - emp) / n)
        assert abs(cdf(STOCK, x0) - emp) <= 3 * se

    @pytest.mark.parametrize("ps", [(2, 1, 1, 1), (1.55, 133.96, 0.94, 88.92),
                                    (0.7, 2, 1.3, 3)])
    def test_derivative_matches_pdf(self, ps):
        # Richardson-extrapolated central difference of the CDF
        p = BgParams(*ps)
        sd = math.sqrt(moments(p).variance)
        for x in np.linspace(-1.8 * sd, 1.8 * sd, 20):
            if abs(x) < 0.05 * sd:
                continue
            h = 0.01 * sd
            d1 = (cdf(p, x + h) - cdf(p, x - h)) / (2 * h)
            d2 = (cdf(p, x + h / 2) - cdf(p, x - h / 2)) / h
            richardson = (4 * d2 - d1) / 3
            assert richardson == pytest.approx(pdf(p, float(x)), rel=1e-6)


class TestQuantile:
    def test_symmetric_median(self):
        p = BgParams(0.8, 1.3, 0.8, 1.3)
        assert abs(quantile(p, 0.5)) < 1e-9

    def test_laplace_value(self):
        assert quantile(LAPLACE, 0.9) == pytest.approx(-math.log(0.2), abs=1e-9)

    def test_round_trip(self):
        p = BgParams(0.7, 2.0, 1.3, 3.0)
        for u in np.linspace(0.01, 0.99, 25):
            assert cdf(p, quantile(p, float(u))) == pytest.approx(
                float(u), abs=1e-9)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(DomainError):
                quantile(LAPLACE, bad)


class TestVarianceGamma:
    def test_parametrization_values(self):
        vp = vg_params(LAPLACE)
        assert (vp.mu, vp.sigma_sq, vp.nu) == pytest.approx((0.0, 2.0, 1.0))
        vp = vg_params((2, 4, 2, 2))
        assert (vp.mu, vp.sigma_sq, vp.nu) == pytest.approx((-0.5, 0.5, 0.5))

    def test_contract(self):
        with pytest.raises(ContractViolationError):
            vg_params((1.0, 1, 1.2, 1))

    def test_laplace_density(self):
        for x in [-2.0, -0.3, 0.4, 1.7]:
            assert vg_pdf((0.0, 2.0, 1.0), x) == pytest.approx(
                0.5 * math.exp(-abs(x)), rel=1e-11)

    def test_symmetric_even(self):
        for x in [0.2, 1.1, 3.0]:
            assert vg_pdf((0.0, 0.7, 2.0), x) == pytest.approx(
                vg_pdf((0.0, 0.7, 2.0), -x), rel=1e-13)

    def test_cross_representation(self):
        p = BgParams(2, 4, 2, 2)
        assert vg_pdf(vg_params(p), 0.3) == pytest.approx(pdf(p, 0.3), rel=1e-10)

    @pytest.mark.parametrize("ps", [(0.5, 1.0, 0.5, 2.0), (1.0, 2.0, 1.0, 3.0),
                                    (2.5, 1.5, 2.5, 0.8)])
    def test_equivalence_grid(self, ps):
        p = BgParams(*ps)
        vp = vg_params(p)
        sd = math.sqrt(moments(p).variance)
        xs = np.linspace(-2.5 * sd, 2.5 * sd, 21)
        for x in xs:
            if x == 0.0:
                continue
            assert vg_pdf(vp, float(x)) == pytest.approx(
                pdf(p, float(x)), rel=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            vg_pdf((0.0, 2.0, 1.0), 0.0)


class TestMomentCharFnConsistency:
    @pytest.mark.parametrize("ps", [(1, 1, 1, 1), (1.55, 133.96, 0.94, 88.92),
                                    (0.7, 2, 1.3, 3)])
    def test_log_charfn_derivatives(self, ps):
        p = BgParams(*ps)
        m = moments(p)
        # scale-aware step: ln phi varies on the scale of 1/stddev
        h = 1e-4 / math.sqrt(m.variance)

        def lnphi(z):
            return cmath.log(char_fn(p, z))

        def d1(hh):
            return (lnphi(hh) - lnphi(-hh)).imag / (2 * hh)

        def d2(hh):
            return (lnphi(hh) + lnphi(-hh)).real / hh**2

        mean_est = (4 * d1(h / 2) - d1(h)) / 3
        var_est = -(4 * d2(h / 2) - d2(h)) / 3
        assert mean_est == pytest.approx(m.mean, rel=1e-5, abs=1e-8)
        assert var_est == pytest.approx(m.variance, rel=1e-5)
