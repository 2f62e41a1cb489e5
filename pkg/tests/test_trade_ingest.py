"""Parsing, serialization round-trips, windowing exactness, synthesis."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mbprice.errors import ConfigError, EmptyInputError, ParseError
from mbprice.trade_ingest import (
    HEADER,
    SynthConfig,
    Trade,
    Window,
    emit_trades,
    missing_window_indices,
    parse_trades,
    partition,
    synth_columns,
    synth_trades,
    window_index,
)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_basic():
    trades = parse_trades("time,price,volume\n10,2.5,4\n11,3,1.5\n")
    assert [(t.time, t.price, t.volume) for t in trades] == [(10, 2.5, 4.0), (11, 3.0, 1.5)]
    assert trades[0].value == 2.5 * 4.0


def test_value_always_recomputed():
    t = Trade.of(0, 3.0, 7.0)
    assert t.value == 21.0


def test_blank_lines_and_bom_tolerated():
    text = "﻿time,price,volume\n\n1,2,3\n   \n2,4,5\n"
    assert len(parse_trades(text)) == 2


@pytest.mark.parametrize(
    "row,msg",
    [
        ("5,2", "expected 3 fields"),
        ("5,2,3,4", "expected 3 fields"),
        ("x,2,3", "not an integer"),
        ("5.5,2,3", "not an integer"),
        ("5,abc,3", "decimal numbers"),
        ("5,2,abc", "decimal numbers"),
        ("5,-1,2", "price must be positive"),
        ("5,0,2", "price must be positive"),
        ("5,nan,2", "price must be positive"),
        ("5,inf,2", "price must be positive"),
        ("5,2,-3", "volume must be positive"),
        ("5,2,0", "volume must be positive"),
    ],
)
def test_parse_rejects_malformed_rows(row, msg):
    with pytest.raises(ParseError, match=msg) as exc:
        parse_trades(f"time,price,volume\n1,2,3\n{row}\n")
    assert exc.value.line == 3


def test_parse_errors_name_the_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_trades("time,price,volume\n5,-1,2\n")


def test_bad_header():
    with pytest.raises(ParseError, match="bad header"):
        parse_trades("time,px,volume\n1,2,3\n")
    with pytest.raises(ParseError, match="missing header"):
        parse_trades("")


def test_empty_input():
    with pytest.raises(EmptyInputError, match="no trades"):
        parse_trades("time,price,volume\n")
    with pytest.raises(EmptyInputError, match="no trades"):
        parse_trades("time,price,volume\n\n\n")


def test_emit_parse_round_trip_bitwise():
    rng = np.random.default_rng(3)
    trades = [
        Trade.of(int(t), float(p), float(u))
        for t, p, u in zip(
            rng.integers(-(2**40), 2**40, 200),
            np.exp(rng.normal(0, 2, 200)),
            np.exp(rng.normal(0, 2, 200)),
        )
    ]
    again = parse_trades(emit_trades(trades))
    assert again == trades


def test_large_input_round_trip():
    # a million rows built by column, compared by column: keeps memory flat
    n = 1_000_000
    cfg = SynthConfig(count=n, seed=11, price_log_sigma=0.4, volume_log_sigma=0.7)
    times, prices, volumes = synth_columns(cfg)
    text = HEADER + "\n" + "\n".join(
        f"{int(t)},{float(p)!r},{float(u)!r}" for t, p, u in zip(times, prices, volumes)
    ) + "\n"
    parsed = parse_trades(text)
    assert len(parsed) == n
    assert parsed[0] == Trade.of(times[0], prices[0], volumes[0])
    assert parsed[-1] == Trade.of(times[-1], prices[-1], volumes[-1])
    assert emit_trades(parsed) == text


# ---------------------------------------------------------------------------
# windowing
# ---------------------------------------------------------------------------


def test_window_interval_is_half_open():
    # [origin + k*delta - delta/2, origin + k*delta + delta/2)
    delta = 10
    assert window_index(4, delta) == 0
    assert window_index(5, delta) == 1  # boundary stamp goes to the upper window
    assert window_index(15, delta) == 2
    assert window_index(-5, delta) == 0
    assert window_index(-6, delta) == -1


def test_window_index_odd_delta_exact():
    # delta = 7: window 1 covers [3.5, 10.5), decided without floats
    assert window_index(3, 7) == 0
    assert window_index(4, 7) == 1
    assert window_index(10, 7) == 1
    assert window_index(11, 7) == 2


def test_window_index_far_from_origin():
    big = 2**62
    assert window_index(big, 10, origin=big) == 0
    assert window_index(big + 5, 10, origin=big) == 1
    k = window_index(-big, 10)
    assert 10 * k - 5 <= -big < 10 * k + 5  # int64-edge stamp, exact interval


@given(
    st.integers(min_value=-(2**62), max_value=2**62),
    st.integers(min_value=1, max_value=10**9),
    st.integers(min_value=-(2**40), max_value=2**40),
)
def test_window_index_matches_exact_interval(time, delta, origin):
    k = window_index(time, delta, origin)
    lo = Fraction(origin) + Fraction(k * delta) - Fraction(delta, 2)
    hi = lo + delta
    assert lo <= time < hi


def test_partition_groups_and_orders():
    trades = [Trade.of(t, 1.0 + t, 1.0) for t in (21, 3, 17, 4, 29)]
    wins = partition(trades, 10)
    assert [w.index for w in wins] == [0, 2, 3]
    assert wins[0].times.tolist() == [3, 4]
    assert wins[1].times.tolist() == [21, 17]  # input order kept inside a window
    assert wins[2].times.tolist() == [29]
    assert wins[1].center == 20 and wins[1].delta == 10


def test_partition_all_trades_in_one_window():
    trades = [Trade.of(t, 2.0, 3.0) for t in (0, 1)]
    wins = partition(trades, 10)
    assert len(wins) == 1 and wins[0].count == 2


def test_thousand_trades_hundred_per_window():
    # consecutive stamps 0..999 with delta 100 and origin 50 split evenly
    trades = [Trade.of(t, 1.0, 1.0) for t in range(1000)]
    wins = partition(trades, 100, origin=50)
    assert len(wins) == 10
    assert all(w.count == 100 for w in wins)
    assert [w.index for w in wins] == list(range(10))


def test_partition_validation():
    with pytest.raises(ConfigError):
        partition([Trade.of(0, 1.0, 1.0)], 0)
    with pytest.raises(EmptyInputError):
        partition([], 10)


def test_missing_windows():
    trades = [Trade.of(t, 1.0, 1.0) for t in (0, 40, 41)]
    wins = partition(trades, 10)
    assert missing_window_indices(wins) == [1, 2, 3]
    assert missing_window_indices([]) == []


@given(
    st.lists(st.integers(min_value=-(2**50), max_value=2**50), min_size=1, max_size=60),
    st.integers(min_value=1, max_value=1000),
    st.integers(min_value=-500, max_value=500),
)
def test_partition_is_total_and_preserves_trades(times, delta, origin):
    trades = [Trade.of(t, 2.0, 3.0) for t in times]
    wins = partition(trades, delta, origin)
    assert sum(w.count for w in wins) == len(trades)
    for w in wins:
        for t in w.times:
            lo = Fraction(origin) + Fraction(w.index * delta) - Fraction(delta, 2)
            assert lo <= int(t) < lo + delta
    # indices strictly increasing
    idx = [w.index for w in wins]
    assert idx == sorted(set(idx))


def test_window_immutable_and_validated():
    w = partition([Trade.of(0, 2.0, 1.0)], 10)[0]
    with pytest.raises(ValueError):
        w.prices[0] = 5.0
    with pytest.raises(ValueError):
        Window(index=0, center=0, delta=10, times=np.array([], dtype=np.int64),
               prices=np.array([]), volumes=np.array([]))
    with pytest.raises(ValueError):
        Window(index=0, center=0, delta=10, times=np.array([1, 2]),
               prices=np.array([1.0]), volumes=np.array([1.0, 1.0]))


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------


def test_synth_deterministic_in_seed():
    a = synth_trades(SynthConfig(count=50, seed=9))
    b = synth_trades(SynthConfig(count=50, seed=9))
    c = synth_trades(SynthConfig(count=50, seed=10))
    assert a == b
    assert a != c


def test_synth_constant_when_sigma_zero():
    _, prices, volumes = synth_columns(
        SynthConfig(count=20, seed=1, price_log_sigma=0.0, volume_log_sigma=0.0,
                    price_log_mean=1.0, volume_log_mean=-0.5)
    )
    assert np.all(prices == np.exp(1.0))
    assert np.all(volumes == np.exp(-0.5))


def test_synth_times_consecutive():
    times, _, _ = synth_columns(SynthConfig(count=5, seed=0, start_time=100))
    assert times.tolist() == [100, 101, 102, 103, 104]


def test_synth_correlation_close_to_target():
    cfg = SynthConfig(count=200_000, seed=4, price_log_sigma=0.3,
                      volume_log_sigma=0.5, log_corr=0.6)
    _, prices, volumes = synth_columns(cfg)
    got = np.corrcoef(np.log(prices), np.log(volumes))[0, 1]
    assert abs(got - 0.6) < 0.01


def test_synth_sigma_close_to_target():
    cfg = SynthConfig(count=200_000, seed=7, price_log_sigma=0.25, volume_log_sigma=0.4)
    _, prices, volumes = synth_columns(cfg)
    assert abs(np.std(np.log(prices)) - 0.25) < 0.005
    assert abs(np.std(np.log(volumes)) - 0.4) < 0.01


def test_synth_validation():
    with pytest.raises(ConfigError):
        SynthConfig(count=0)
    with pytest.raises(ConfigError):
        SynthConfig(price_log_sigma=-0.1)
    with pytest.raises(ConfigError):
        SynthConfig(log_corr=1.5)
