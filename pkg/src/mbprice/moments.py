"""Volume-weighted trade moments and the price statistics built from them.

The n-th market-based price moment weights each trade's n-th price power by
the n-th power of its volume:

    p[n] = C[n] / U[n],   C[n] = mean(value_i^n),   U[n] = mean(volume_i^n)

so p[1] is the VWAP. The conventional frequency-based moment
f[n] = mean(price_i^n) ignores volumes; the two families agree only when
volumes carry no information about prices (e.g. constant volume), and their
gap is itself a diagnostic. All reductions are compensated sums in input
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .accum import comp_mean, comp_sum_rows
from .errors import DegenerateDistributionError
from .trade_ingest import Window

# sigma_p^2 in [-VARIANCE_CLIP_BAND * p[1]^2, 0) is treated as rounding debris
# and clipped to 0; anything more negative is preserved and flagged.
VARIANCE_CLIP_BAND = 1e-10
# below this relative variance, skewness/kurtosis divide by ~0
SHAPE_DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class TradeMoments:
    """Raw value/volume moment averages of one window, orders 1..order."""

    order: int
    count: int
    value_moments: tuple[float, ...]
    volume_moments: tuple[float, ...]
    inv_volume_moment: float

    def value_moment(self, n: int) -> float:
        self._check(n)
        return self.value_moments[n - 1]

    def volume_moment(self, n: int) -> float:
        self._check(n)
        return self.volume_moments[n - 1]

    def _check(self, n: int) -> None:
        if not 1 <= n <= self.order:
            raise ValueError(f"moment order {n} outside 1..{self.order}")


@dataclass(frozen=True)
class PriceStats:
    """Market-based price statistics of one window.

    raw_moments[n-1] is p[n]; freq_moments[n-1] is f[n]. skewness/kurtosis
    are None when the variance cannot support them (see warnings).
    """

    order: int
    raw_moments: tuple[float, ...]
    variance: float
    skewness: float | None
    kurtosis: float | None
    freq_moments: tuple[float, ...]
    warnings: tuple[str, ...] = ()

    @property
    def vwap(self) -> float:
        return self.raw_moments[0]


def power_columns(base: np.ndarray, order: int) -> np.ndarray:
    """Rows [base^1 .. base^order] built by cumulative multiplication."""
    rows = np.empty((order, base.size))
    rows[0] = base
    for n in range(1, order):
        np.multiply(rows[n - 1], base, out=rows[n])
    return rows


def trade_moments(w: Window, order: int) -> TradeMoments:
    """C[1..order], U[1..order] and U(-1) for one window, compensated."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    rows = np.empty((2 * order + 1, w.count))
    rows[0:order] = power_columns(w.values, order)
    rows[order : 2 * order] = power_columns(w.volumes, order)
    np.divide(1.0, w.volumes, out=rows[2 * order])
    sums = comp_sum_rows(rows) / w.count
    return TradeMoments(
        order=order,
        count=w.count,
        value_moments=tuple(float(v) for v in sums[0:order]),
        volume_moments=tuple(float(v) for v in sums[order : 2 * order]),
        inv_volume_moment=float(sums[2 * order]),
    )


def price_moment(tm: TradeMoments, n: int) -> float:
    """Market-based price moment p[n] = C[n]/U[n]."""
    return tm.value_moment(n) / tm.volume_moment(n)


def frequency_moment(w: Window, n: int) -> float:
    """Frequency-based price moment f[n] = mean(price^n), volumes ignored."""
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    return comp_mean(w.prices**n)


def central_from_raw(raw: Sequence[float]) -> tuple[float, ...]:
    """Central moments (variance, third, fourth) from raw moments m1..m4.

    Standard binomial expansion about the mean; returns as many central
    moments (starting at order 2) as the input supports.
    """
    m1 = raw[0]
    out = []
    if len(raw) >= 2:
        out.append(raw[1] - m1 * m1)
    if len(raw) >= 3:
        out.append(raw[2] - 3.0 * m1 * raw[1] + 2.0 * m1**3)
    if len(raw) >= 4:
        out.append(raw[3] - 4.0 * m1 * raw[2] + 6.0 * m1**2 * raw[1] - 3.0 * m1**4)
    return tuple(out)


def price_central_stats(
    tm: TradeMoments,
    freq_moments: Sequence[float] = (),
    on_degenerate: str = "raise",
) -> PriceStats:
    """Variance, skewness, kurtosis from market-based raw price moments.

    A variance within the clip band below zero is rounding debris and is
    clipped to 0 with a warning; a variance more negative than that is kept
    and flagged as a diagnostic. When the variance cannot support shape
    statistics and the order asks for them, on_degenerate chooses between
    raising DegenerateDistributionError ("raise") and reporting them as None
    ("null").
    """
    if on_degenerate not in ("raise", "null"):
        raise ValueError(f"on_degenerate must be 'raise' or 'null', got {on_degenerate!r}")
    raw = tuple(price_moment(tm, n) for n in range(1, tm.order + 1))
    warnings: list[str] = []
    variance = 0.0
    skewness: float | None = None
    kurtosis: float | None = None
    if tm.order >= 2:
        central = central_from_raw(raw)
        variance = central[0]
        vwap2 = raw[0] * raw[0]
        if -VARIANCE_CLIP_BAND * vwap2 <= variance < 0.0:
            warnings.append(f"variance {variance:.3e} within rounding band, clipped to 0")
            variance = 0.0
        elif variance < 0.0:
            warnings.append(
                f"negative variance {variance:.3e} beyond rounding band; "
                "moment inputs are inconsistent"
            )
        if tm.order >= 3:
            if variance <= SHAPE_DEGENERACY_TOL * vwap2:
                msg = f"variance {variance:.3e} too small for shape statistics"
                if on_degenerate == "raise":
                    raise DegenerateDistributionError(msg)
                warnings.append(msg)
            else:
                sigma = np.sqrt(variance)
                skewness = central[1] / sigma**3
                if tm.order >= 4:
                    kurtosis = central[2] / variance**2
    return PriceStats(
        order=tm.order,
        raw_moments=raw,
        variance=variance,
        skewness=skewness,
        kurtosis=kurtosis,
        freq_moments=tuple(freq_moments),
        warnings=tuple(warnings),
    )


def window_price_stats(
    w: Window, order: int, on_degenerate: str = "raise"
) -> tuple[TradeMoments, PriceStats]:
    """trade_moments plus price stats with frequency moments filled in."""
    tm = trade_moments(w, order)
    freq_rows = power_columns(w.prices, order)
    freq = tuple(float(v) / w.count for v in comp_sum_rows(freq_rows))
    return tm, price_central_stats(tm, freq_moments=freq, on_degenerate=on_degenerate)
