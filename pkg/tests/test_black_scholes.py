import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailpricer.black_scholes import (
    BSInputs,
    bs_call,
    bs_call_dK,
    bs_put,
    implied_vol,
    norm_cdf,
    vega,
)
from tailpricer.errors import ParameterError, PriceBoundsError

from oracles import bs_quad, central_diff

ATM_PRICE = 7.965567455405804  # bs_call(100, 100, 0.2, 1), frozen from bs_quad


def test_norm_cdf_reference_points():
    assert norm_cdf(0.0) == pytest.approx(0.5, abs=1e-16)
    assert norm_cdf(1.0) == pytest.approx(0.841344746068543, abs=1e-15)
    assert norm_cdf(-8.0) == pytest.approx(6.22096057427178e-16, rel=1e-12)


class TestPricing:
    def test_atm_call_matches_lognormal_quadrature(self):
        got = bs_call(BSInputs(100, 100, 0.2, 1))
        assert got == pytest.approx(bs_quad(100, 100, 0.2, 1), abs=1e-8)
        assert got == pytest.approx(ATM_PRICE, rel=1e-12)

    def test_low_vol_limit_is_intrinsic(self):
        assert bs_call(BSInputs(100, 80, 1e-8, 1)) == pytest.approx(20.0, abs=1e-10)
        assert bs_put(BSInputs(100, 120, 1e-8, 1)) == pytest.approx(20.0, abs=1e-10)

    def test_far_call_is_worthless(self):
        assert bs_call(BSInputs(100, 1e6, 0.2, 1)) == pytest.approx(0.0, abs=1e-12)

    def test_put_from_parity_fixture(self):
        assert bs_put(BSInputs(100, 100, 0.2, 1)) == pytest.approx(ATM_PRICE, rel=1e-12)

    def test_rejects_nonpositive_inputs(self):
        with pytest.raises(ParameterError):
            BSInputs(100, 100, -0.2, 1)
        with pytest.raises(ParameterError):
            BSInputs(0, 100, 0.2, 1)

    @given(
        S0=st.floats(min_value=10.0, max_value=1000.0),
        K=st.floats(min_value=10.0, max_value=1000.0),
        sigma=st.floats(min_value=0.01, max_value=2.0),
        t=st.floats(min_value=0.05, max_value=5.0),
    )
    @settings(max_examples=300)
    def test_put_call_parity(self, S0, K, sigma, t):
        inputs = BSInputs(S0, K, sigma, t)
        assert bs_call(inputs) - bs_put(inputs) == pytest.approx(S0 - K, abs=1e-9 * S0)

    @given(
        K=st.floats(min_value=50.0, max_value=300.0),
        sigma=st.floats(min_value=0.05, max_value=1.5),
    )
    @settings(max_examples=200)
    def test_call_within_static_band(self, K, sigma):
        price = bs_call(BSInputs(100, K, sigma, 1))
        assert max(100 - K, 0.0) <= price <= 100.0

    @given(
        K=st.floats(min_value=60.0, max_value=250.0),
        sigma=st.floats(min_value=0.05, max_value=1.0),
    )
    @settings(max_examples=100)
    def test_call_decreasing_convex_in_strike(self, K, sigma):
        f = lambda k: bs_call(BSInputs(100, k, sigma, 1))
        h = 1e-3 * K
        assert f(K + h) < f(K)
        assert f(K + h) + f(K - h) - 2 * f(K) >= -1e-10


class TestImpliedVol:
    def test_round_trip_identity(self):
        price = bs_call(BSInputs(100, 120, 0.3, 0.25))
        assert implied_vol(price, 100, 120, 0.25) == pytest.approx(0.3, abs=1e-8)

    def test_atm_fixture(self):
        assert implied_vol(ATM_PRICE, 100, 100, 1) == pytest.approx(0.2, abs=1e-8)

    def test_below_intrinsic_rejected(self):
        with pytest.raises(PriceBoundsError):
            implied_vol(19.0, 100, 80, 1, side="call")

    def test_above_spot_rejected(self):
        with pytest.raises(PriceBoundsError):
            implied_vol(101.0, 100, 80, 1, side="call")

    def test_put_side_round_trip(self):
        price = bs_put(BSInputs(100, 90, 0.4, 0.5))
        assert implied_vol(price, 100, 90, 0.5, side="put") == pytest.approx(0.4, abs=1e-8)

    def test_unknown_side(self):
        with pytest.raises(ParameterError):
            implied_vol(5.0, 100, 100, 1, side="straddle")

    @given(
        sigma=st.floats(min_value=0.01, max_value=3.0),
        t=st.floats(min_value=0.1, max_value=2.0),
    )
    @settings(max_examples=200)
    def test_round_trip_across_sigma_range(self, sigma, t):
        price = bs_call(BSInputs(100, 100, sigma, t))
        assert implied_vol(price, 100, 100, t) == pytest.approx(sigma, abs=1e-8)


class TestCallStrikeDerivative:
    def test_deep_itm_spread_limit(self):
        got = bs_call_dK(BSInputs(100, 1.0, 0.2, 1), 0.0)
        assert got == pytest.approx(-1.0, abs=1e-9)

    def test_flat_skew_atm(self):
        got = bs_call_dK(BSInputs(100, 100, 0.2, 1), 0.0)
        assert got == pytest.approx(-0.460172162723, rel=1e-11)
        fd = central_diff(lambda k: bs_call(BSInputs(100, k, 0.2, 1)), 100.0, 1e-4 * 100)
        assert got == pytest.approx(fd, rel=1e-6)

    def test_with_skew_slope(self):
        slope = 0.001
        got = bs_call_dK(BSInputs(100, 100, 0.2, 1), slope)
        expected = -0.460172162723 + vega(BSInputs(100, 100, 0.2, 1)) * slope
        assert got == pytest.approx(expected, rel=1e-11)

    def test_matches_total_finite_difference_along_skew(self):
        # sigma varies linearly with K around the evaluation point
        S0, K0, sigma0, t, slope = 100.0, 110.0, 0.25, 0.5, 0.0015

        def priced(k: float) -> float:
            return bs_call(BSInputs(S0, k, sigma0 + slope * (k - K0), t))

        fd = central_diff(priced, K0, 1e-4 * K0)
        assert bs_call_dK(BSInputs(S0, K0, sigma0, t), slope) == pytest.approx(fd, rel=1e-6)

    def test_rejects_nonfinite_slope(self):
        with pytest.raises(ParameterError):
            bs_call_dK(BSInputs(100, 100, 0.2, 1), math.inf)

    @given(
        K=st.floats(min_value=60.0, max_value=250.0),
        sigma=st.floats(min_value=0.05, max_value=1.0),
        t=st.floats(min_value=0.1, max_value=2.0),
    )
    @settings(max_examples=200)
    def test_flat_skew_slope_is_a_probability_weight(self, K, sigma, t):
        got = bs_call_dK(BSInputs(100, K, sigma, t), 0.0)
        assert -1.0 <= got <= 0.0
