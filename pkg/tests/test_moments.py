"""Volume-weighted moments against the exact rational oracle and scaling laws.

The two-trade fixture values below were computed exactly in
oracle_helpers (fractions.Fraction) and are re-derived in-test so a frozen
constant and its oracle cannot drift apart silently.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from mbprice.errors import DegenerateDistributionError
from mbprice.moments import (
    TradeMoments,
    central_from_raw,
    frequency_moment,
    price_central_stats,
    price_moment,
    trade_moments,
    window_price_stats,
)

from oracle_helpers import (
    W2_PAIRS,
    frac_central,
    frac_freq_moment,
    frac_price_moment,
    frac_value_moment,
    frac_volume_moment,
    make_window,
    naive_price_moment,
)

REL = 1e-12


def test_two_trade_window_exact_dyadic_values():
    # prices 2,4 volumes 1,3: every quantity below is dyadic, so equality
    # against the rational oracle is bitwise
    w = make_window(W2_PAIRS)
    tm = trade_moments(w, 2)
    assert tm.value_moments == (7.0, 74.0)
    assert tm.volume_moments == (2.0, 5.0)
    assert price_moment(tm, 1) == 3.5
    assert frequency_moment(w, 1) == 3.0
    assert frequency_moment(w, 2) == 10.0
    assert float(frac_value_moment(W2_PAIRS, 1)) == 7.0
    assert float(frac_price_moment(W2_PAIRS, 1)) == 3.5


def test_two_trade_window_nondyadic_values():
    w = make_window(W2_PAIRS)
    tm = trade_moments(w, 2)
    # U(-1) = 2/3 and p[2] = 74/5 are not representable; compare to the
    # rational oracle at rounding precision
    assert tm.inv_volume_moment == pytest.approx(float(Fraction(2, 3)), rel=1e-15)
    assert price_moment(tm, 2) == pytest.approx(14.8, rel=1e-15)
    ps = price_central_stats(tm)
    assert ps.variance == pytest.approx(2.55, rel=REL)
    assert float(frac_central([frac_price_moment(W2_PAIRS, n) for n in (1, 2)])[0]) == 2.55


def test_four_moment_orders_match_oracle():
    w = make_window(W2_PAIRS)
    tm = trade_moments(w, 4)
    for n in range(1, 5):
        assert tm.value_moment(n) == pytest.approx(float(frac_value_moment(W2_PAIRS, n)), rel=REL)
        assert tm.volume_moment(n) == pytest.approx(float(frac_volume_moment(W2_PAIRS, n)), rel=REL)
        assert price_moment(tm, n) == pytest.approx(float(frac_price_moment(W2_PAIRS, n)), rel=REL)
        assert frequency_moment(w, n) == pytest.approx(float(frac_freq_moment(W2_PAIRS, n)), rel=REL)


def test_single_trade_window():
    w = make_window([(5.0, 2.0)])
    tm = trade_moments(w, 4)
    for n in range(1, 5):
        assert price_moment(tm, n) == pytest.approx(5.0**n, rel=REL)
    ps = price_central_stats(tm, on_degenerate="null")
    assert ps.variance == 0.0
    assert ps.skewness is None and ps.kurtosis is None


def test_moments_match_naive_oracle_on_random_data():
    rng = np.random.default_rng(12)
    prices = np.exp(rng.normal(0.1, 0.4, 500))
    volumes = np.exp(rng.normal(-0.2, 0.8, 500))
    w = make_window(list(zip(prices, volumes)))
    tm = trade_moments(w, 4)
    for n in range(1, 5):
        assert price_moment(tm, n) == pytest.approx(naive_price_moment(prices, volumes, n), rel=1e-13)


def test_constant_volume_collapses_to_frequency_moments():
    rng = np.random.default_rng(5)
    prices = np.exp(rng.normal(0, 0.3, 300))
    w = make_window([(p, 7.5) for p in prices])
    tm = trade_moments(w, 4)
    for n in range(1, 5):
        assert price_moment(tm, n) == pytest.approx(frequency_moment(w, n), rel=REL)


def test_volume_scaling_leaves_price_moments_unchanged():
    # volumes scaled by a power of two: U[n] and C[n] scale by the same
    # exact factor, so every price moment is bit-identical
    rng = np.random.default_rng(8)
    prices = np.exp(rng.normal(0, 0.3, 100))
    volumes = np.exp(rng.normal(0, 0.5, 100))
    w1 = make_window(list(zip(prices, volumes)))
    w2 = make_window(list(zip(prices, volumes * 4.0)))
    t1, t2 = trade_moments(w1, 4), trade_moments(w2, 4)
    for n in range(1, 5):
        assert price_moment(t1, n) == price_moment(t2, n)


def test_price_scaling_is_homogeneous():
    rng = np.random.default_rng(9)
    prices = np.exp(rng.normal(0, 0.3, 100))
    volumes = np.exp(rng.normal(0, 0.5, 100))
    lam = 37.25
    t1 = trade_moments(make_window(list(zip(prices, volumes))), 4)
    t2 = trade_moments(make_window(list(zip(prices * lam, volumes))), 4)
    for n in range(1, 5):
        assert price_moment(t2, n) == pytest.approx(lam**n * price_moment(t1, n), rel=1e-13)
    s1 = price_central_stats(t1)
    s2 = price_central_stats(t2)
    assert s2.variance == pytest.approx(lam**2 * s1.variance, rel=1e-10)
    # shape statistics are scale-free
    assert s2.skewness == pytest.approx(s1.skewness, rel=1e-9)
    assert s2.kurtosis == pytest.approx(s1.kurtosis, rel=1e-9)


def test_vwap_between_price_extremes():
    rng = np.random.default_rng(21)
    for _ in range(20):
        prices = np.exp(rng.normal(0, 0.5, 50))
        volumes = np.exp(rng.normal(0, 1.0, 50))
        tm = trade_moments(make_window(list(zip(prices, volumes))), 1)
        vwap = price_moment(tm, 1)
        assert prices.min() * (1 - 1e-14) <= vwap <= prices.max() * (1 + 1e-14)


def test_cauchy_schwarz_within_one_weighting():
    # CS holds inside a single volume weighting: C[2] >= C[1]^2,
    # U[2] >= U[1]^2, and E[p^2 u^2] E[u^2] >= E[p u^2]^2. It does NOT
    # relate p[2] to p[1]^2, which mix different weightings.
    rng = np.random.default_rng(22)
    for _ in range(20):
        prices = np.exp(rng.normal(0, 0.5, 40))
        volumes = np.exp(rng.normal(0, 1.0, 40))
        tm = trade_moments(make_window(list(zip(prices, volumes))), 2)
        assert tm.value_moment(2) >= tm.value_moment(1) ** 2 * (1 - 1e-13)
        assert tm.volume_moment(2) >= tm.volume_moment(1) ** 2 * (1 - 1e-13)
        lhs = np.mean(prices**2 * volumes**2) * np.mean(volumes**2)
        rhs = np.mean(prices * volumes**2) ** 2
        assert lhs >= rhs * (1 - 1e-13)


def test_anticorrelated_sample_variance_is_genuinely_negative():
    # p[1] weights by u, p[2] by u^2; with price and volume anticorrelated
    # the heavier weighting drags p[2] below p[1]^2. prices (3,1) against
    # volumes (1,3): p[1] = 1.5, p[2] = 1.8, variance = -0.45 exactly.
    # No distribution has these raw moments, and the stats say so.
    w = make_window([(3.0, 1.0), (1.0, 3.0)])
    tm = trade_moments(w, 2)
    assert price_moment(tm, 1) == 1.5
    assert price_moment(tm, 2) == 1.8
    ps = price_central_stats(tm)
    assert ps.variance == pytest.approx(-0.45, rel=1e-14)
    assert any("inconsistent" in msg for msg in ps.warnings)


@given(
    st.lists(
        st.tuples(
            st.floats(min_value=0.01, max_value=100.0),
            st.floats(min_value=0.01, max_value=100.0),
        ),
        min_size=1,
        max_size=40,
    )
)
def test_price_moments_match_rational_oracle(pairs):
    w = make_window(pairs)
    tm = trade_moments(w, 4)
    for n in range(1, 5):
        expect = frac_price_moment([(Fraction(p), Fraction(u)) for p, u in pairs], n)
        assert price_moment(tm, n) == pytest.approx(float(expect), rel=1e-11)


@given(
    st.lists(st.floats(min_value=0.5, max_value=2.0), min_size=2, max_size=30),
)
def test_variance_never_goes_negative_beyond_band(prices):
    assume(max(prices) > min(prices))
    w = make_window([(p, 1.0) for p in prices])
    tm = trade_moments(w, 2)
    ps = price_central_stats(tm)
    assert ps.variance >= 0.0


def test_central_from_raw_lengths():
    assert central_from_raw([3.0]) == ()
    assert len(central_from_raw([3.0, 10.0])) == 1
    assert len(central_from_raw([3.0, 10.0, 40.0, 200.0])) == 3


def test_variance_clip_band():
    # hand-built inputs: variance -4e-12 relative to vwap^2 sits inside the
    # band and clips to zero with a warning
    tm = TradeMoments(order=2, count=10, value_moments=(1.0, 1.0 - 4e-12),
                      volume_moments=(1.0, 1.0), inv_volume_moment=1.0)
    ps = price_central_stats(tm)
    assert ps.variance == 0.0
    assert any("clipped" in w for w in ps.warnings)


def test_variance_beyond_band_is_kept_and_flagged():
    tm = TradeMoments(order=2, count=10, value_moments=(1.0, 1.0 - 4e-8),
                      volume_moments=(1.0, 1.0), inv_volume_moment=1.0)
    ps = price_central_stats(tm)
    assert ps.variance == pytest.approx(-4e-8, rel=1e-6)
    assert any("inconsistent" in w for w in ps.warnings)


def test_degenerate_shape_statistics():
    w = make_window([(3.0, 1.0), (3.0, 2.0)])  # constant price
    tm = trade_moments(w, 4)
    with pytest.raises(DegenerateDistributionError):
        price_central_stats(tm)
    ps = price_central_stats(tm, on_degenerate="null")
    assert ps.skewness is None and ps.kurtosis is None
    assert any("too small" in w_ for w_ in ps.warnings)
    with pytest.raises(ValueError):
        price_central_stats(tm, on_degenerate="maybe")


def test_window_price_stats_fills_frequency_side():
    w = make_window(W2_PAIRS)
    tm, ps = window_price_stats(w, 2)
    assert ps.freq_moments == (3.0, 10.0)
    assert ps.raw_moments[0] == 3.5
    assert tm.order == 2


def test_order_validation():
    w = make_window(W2_PAIRS)
    with pytest.raises(ValueError):
        trade_moments(w, 0)
    tm = trade_moments(w, 2)
    with pytest.raises(ValueError):
        tm.value_moment(3)
    with pytest.raises(ValueError):
        price_moment(tm, 0)
    with pytest.raises(ValueError):
        frequency_moment(w, 0)
