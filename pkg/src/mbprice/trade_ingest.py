"""Trade records, CSV parse/emit, time windowing, synthetic generation.

Input format: UTF-8 CSV, header ``time,price,volume``, one trade per row.
``time`` is an integer nanosecond stamp, ``price`` and ``volume`` are decimal
strings. The traded value of each record is always recomputed as
price * volume at construction, so the value/price/volume triple can never
drift apart.

Windowing is by time, not by trade count: window k covers the half-open
interval [origin + k*delta - delta/2, origin + k*delta + delta/2), so every
stamp belongs to exactly one window. Membership is decided in exact integer
arithmetic; odd deltas need no floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import ConfigError, EmptyInputError, ParseError

HEADER = "time,price,volume"


@dataclass(frozen=True)
class Trade:
    """One executed trade. `value` is price * volume, always recomputed."""

    time: int
    price: float
    volume: float
    value: float

    @staticmethod
    def of(time: int, price: float, volume: float) -> "Trade":
        if not (price > 0.0) or not np.isfinite(price):
            raise ValueError(f"price must be positive and finite, got {price}")
        if not (volume > 0.0) or not np.isfinite(volume):
            raise ValueError(f"volume must be positive and finite, got {volume}")
        return Trade(int(time), float(price), float(volume), float(price) * float(volume))


@dataclass(frozen=True)
class Window:
    """Trades falling in [center - delta/2, center + delta/2), input order kept.

    Columns are stored as read-only numpy arrays; `trades` materializes the
    record view on demand.
    """

    index: int
    center: int
    delta: int
    times: np.ndarray
    prices: np.ndarray
    volumes: np.ndarray
    values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=np.int64)
        prices = np.ascontiguousarray(self.prices, dtype=np.float64)
        volumes = np.ascontiguousarray(self.volumes, dtype=np.float64)
        if not (times.shape == prices.shape == volumes.shape) or times.ndim != 1:
            raise ValueError("window columns must be 1-D and equally long")
        if times.size == 0:
            raise ValueError("window must hold at least one trade")
        values = self.values
        if values is None:
            values = prices * volumes
        values = np.ascontiguousarray(values, dtype=np.float64)
        for arr, name in ((times, "times"), (prices, "prices"), (volumes, "volumes"), (values, "values")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def count(self) -> int:
        return int(self.times.size)

    @property
    def half_width(self) -> float:
        return self.delta / 2.0

    @property
    def trades(self) -> list[Trade]:
        return [
            Trade(int(t), float(p), float(u), float(c))
            for t, p, u, c in zip(self.times, self.prices, self.volumes, self.values)
        ]

    @staticmethod
    def from_trades(index: int, center: int, delta: int, trades: Iterable[Trade]) -> "Window":
        ts = list(trades)
        return Window(
            index=index,
            center=center,
            delta=delta,
            times=np.array([t.time for t in ts], dtype=np.int64),
            prices=np.array([t.price for t in ts], dtype=np.float64),
            volumes=np.array([t.volume for t in ts], dtype=np.float64),
            values=np.array([t.value for t in ts], dtype=np.float64),
        )


@dataclass(frozen=True)
class SynthConfig:
    """Jointly lognormal price/volume generator settings.

    log price and log volume are Gaussian with the given means and sigmas and
    correlation `log_corr`; stamps are consecutive integers from `start_time`.
    The draw is fully determined by `seed`.
    """

    count: int = 1000
    seed: int = 0
    price_log_mean: float = 0.0
    price_log_sigma: float = 0.2
    volume_log_mean: float = 0.0
    volume_log_sigma: float = 0.5
    log_corr: float = 0.0
    start_time: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")
        if self.price_log_sigma < 0 or self.volume_log_sigma < 0:
            raise ConfigError("log sigmas must be >= 0")
        if not -1.0 <= self.log_corr <= 1.0:
            raise ConfigError(f"log_corr must lie in [-1, 1], got {self.log_corr}")


# ---------------------------------------------------------------------------
# parsing / emitting
# ---------------------------------------------------------------------------


def parse_trades(source: str | Iterable[str]) -> list[Trade]:
    """Parse CSV text (or an iterable of lines) into trades, input order kept.

    Malformed rows raise ParseError naming the 1-based line; a header with no
    rows raises EmptyInputError.
    """
    lines: Iterator[str] = iter(source.splitlines()) if isinstance(source, str) else iter(source)
    try:
        header = next(lines).strip().lstrip("﻿")
    except StopIteration:
        raise ParseError(1, f"missing header, expected '{HEADER}'") from None
    if header != HEADER:
        raise ParseError(1, f"bad header {header!r}, expected '{HEADER}'")

    trades: list[Trade] = []
    lineno = 1
    for raw in lines:
        lineno += 1
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(lineno, f"expected 3 fields, got {len(parts)}")
        t_s, p_s, u_s = (s.strip() for s in parts)
        try:
            t = int(t_s)
        except ValueError:
            raise ParseError(lineno, f"time {t_s!r} is not an integer") from None
        try:
            p = float(p_s)
            u = float(u_s)
        except ValueError:
            raise ParseError(lineno, "price/volume must be decimal numbers") from None
        if not np.isfinite(p) or p <= 0.0:
            raise ParseError(lineno, f"price must be positive and finite, got {p_s}")
        if not np.isfinite(u) or u <= 0.0:
            raise ParseError(lineno, f"volume must be positive and finite, got {u_s}")
        trades.append(Trade(t, p, u, p * u))
    if not trades:
        raise EmptyInputError("no trades")
    return trades


def emit_trades(trades: Iterable[Trade]) -> str:
    """Serialize trades to the input CSV format; floats use shortest
    round-trip notation so parse(emit(x)) == x bit for bit."""
    out = [HEADER]
    out.extend(f"{t.time},{t.price!r},{t.volume!r}" for t in trades)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# windowing
# ---------------------------------------------------------------------------


def window_index(time: int, delta: int, origin: int = 0) -> int:
    """Index k of the half-open window [origin + k*delta - delta/2,
    origin + k*delta + delta/2) containing `time`; exact integer arithmetic."""
    if delta <= 0:
        raise ConfigError(f"delta must be a positive integer, got {delta}")
    return (2 * (int(time) - int(origin)) + delta) // (2 * delta)


def partition(trades: list[Trade], delta: int, origin: int = 0) -> list[Window]:
    """Group trades into time windows; empty windows are omitted.

    Returned windows are ordered by index; trades inside a window keep input
    order. Gaps can be recovered with missing_window_indices.
    """
    if delta <= 0:
        raise ConfigError(f"delta must be a positive integer, got {delta}")
    if not trades:
        raise EmptyInputError("no trades")
    times = np.array([t.time for t in trades], dtype=np.int64)
    prices = np.array([t.price for t in trades], dtype=np.float64)
    volumes = np.array([t.volume for t in trades], dtype=np.float64)
    values = np.array([t.value for t in trades], dtype=np.float64)

    # Python-int arithmetic: stamps near the int64 edge must not overflow.
    ks = np.array(
        [(2 * (int(t) - int(origin)) + delta) // (2 * delta) for t in times],
        dtype=np.int64,
    )
    order = np.argsort(ks, kind="stable")  # stable: input order kept per window
    ks_sorted = ks[order]
    boundaries = np.flatnonzero(np.diff(ks_sorted)) + 1
    groups = np.split(order, boundaries)

    windows = []
    for grp in groups:
        k = int(ks[grp[0]])
        windows.append(
            Window(
                index=k,
                center=int(origin) + k * int(delta),
                delta=int(delta),
                times=times[grp],
                prices=prices[grp],
                volumes=volumes[grp],
                values=values[grp],
            )
        )
    return windows


def missing_window_indices(windows: list[Window]) -> list[int]:
    """Indices of empty windows between the first and last non-empty one."""
    if not windows:
        return []
    present = {w.index for w in windows}
    lo = min(present)
    hi = max(present)
    return [k for k in range(lo, hi + 1) if k not in present]


# ---------------------------------------------------------------------------
# synthetic trades
# ---------------------------------------------------------------------------


def synth_columns(cfg: SynthConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(times, prices, volumes) arrays for `cfg`; deterministic in cfg.seed."""
    rng = np.random.default_rng(cfg.seed)
    z = rng.standard_normal((2, cfg.count))
    log_p = cfg.price_log_mean + cfg.price_log_sigma * z[0]
    mix = cfg.log_corr * z[0] + np.sqrt(1.0 - cfg.log_corr**2) * z[1]
    log_u = cfg.volume_log_mean + cfg.volume_log_sigma * mix
    times = cfg.start_time + np.arange(cfg.count, dtype=np.int64)
    return times, np.exp(log_p), np.exp(log_u)


def synth_trades(cfg: SynthConfig) -> list[Trade]:
    times, prices, volumes = synth_columns(cfg)
    values = prices * volumes
    return [
        Trade(int(t), float(p), float(u), float(c))
        for t, p, u, c in zip(times, prices, volumes, values)
    ]
