"""Returns and inflation statistics derived from market-based price moments.

Returns against a reference price p_ref are plain binomial recombinations of
the price index moments a[n] = p[n]/p_ref^n:

    r[n] = sum_{m=0..n} (-1)^(n-m) C(n,m) a[m],        a[0] = 1

so the whole returns distribution shape is inherited from the price moments:
p_ref^2 sigma_r^2 = sigma_p^2 and the skewness/kurtosis of returns equal
those of price. A second route evaluates the same r[n] directly from trade
value/volume moment ratios; the two must agree to rounding.

Inflation compares a later window against a base window through the mean
base price, or equivalently through trade value/volume growth indices

    c[n] = C_later[n] / C_base[1]^n,    u[n] = U_later[n] / U_base[1]^n

    In[n] = sum_{j=0..n} (-1)^j C(n,j) p_later[n-j] / p_base[1]^(n-j)
          = sum_{j=0..n} (-1)^j C(n,j) c[n-j] / u[n-j]

with sigma_In^2 = In[2] - In[1]^2 = sigma_p^2(later) / p_base[1]^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .errors import DegenerateDistributionError
from .faults import flip
from .moments import SHAPE_DEGENERACY_TOL, PriceStats, TradeMoments, central_from_raw, price_moment


@dataclass(frozen=True)
class ReturnsStats:
    """Market-based returns statistics against a fixed reference price."""

    ref_price: float
    order: int
    index_moments: tuple[float, ...]
    moments: tuple[float, ...]
    trade_route_moments: tuple[float, ...]
    variance: float | None
    skewness: float | None
    kurtosis: float | None


@dataclass(frozen=True)
class ReturnsShapeCheck:
    """Shape statistics of returns with residuals against the price side."""

    skewness: float | None
    kurtosis: float | None
    volatility_residual: float
    skewness_residual: float | None
    kurtosis_residual: float | None


@dataclass(frozen=True)
class InflationStats:
    """Inflation moments of a later window against a base window."""

    order: int
    base_mean_price: float
    moments: tuple[float, ...]
    index_route_moments: tuple[float, ...]
    value_indices: tuple[float, ...]
    volume_indices: tuple[float, ...]
    variance: float
    variance_via_price: float
    route_residuals: tuple[float, ...]
    index_ratio_residuals: tuple[float, ...]
    volatility_residual: float


def index_moment(raw_price_moments: Sequence[float], p_ref: float, n: int) -> float:
    """a[n] = p[n] / p_ref^n."""
    if not p_ref > 0.0:
        raise ValueError(f"reference price must be positive, got {p_ref}")
    if not 1 <= n <= len(raw_price_moments):
        raise ValueError(f"moment order {n} outside 1..{len(raw_price_moments)}")
    return raw_price_moments[n - 1] / p_ref**n


def returns_moments(index_moments: Sequence[float]) -> tuple[float, ...]:
    """r[1..m] from index moments given as (a[0], a[1], ..., a[m]), a[0] = 1."""
    if not index_moments or index_moments[0] != 1.0:
        raise ValueError("index moments must start with a[0] = 1")
    out = []
    for n in range(1, len(index_moments)):
        total = 0.0
        for m in range(n + 1):
            total += (-1.0) ** (n - m) * comb(n, m) * index_moments[m]
        out.append(total)
    return tuple(out)


def trade_route_returns_moments(tm: TradeMoments, p_ref: float) -> tuple[float, ...]:
    """r[1..m] evaluated directly from trade value/volume moment ratios.

    Same binomial sum, but each index moment enters as
    p_ref^-m * (C[m]/U[m]) rather than through precomputed a[m]; agreement
    with returns_moments is one of the verification gates.
    """
    if not p_ref > 0.0:
        raise ValueError(f"reference price must be positive, got {p_ref}")
    out = []
    for n in range(1, tm.order + 1):
        total = 0.0
        for m in range(n + 1):
            ratio = 1.0 if m == 0 else p_ref**-m * (tm.value_moment(m) / tm.volume_moment(m))
            sign = (-1.0) ** (n - m)
            if m == n - 1:
                sign *= flip("returns-route-agreement")
            total += sign * comb(n, m) * ratio
        out.append(total)
    return tuple(out)


def returns_stats(tm: TradeMoments, p_ref: float, on_degenerate: str = "raise") -> ReturnsStats:
    """Full returns statistics for one window against p_ref.

    The central expansion is written out here, on returns moments, so the
    equality of returns shape statistics with price shape statistics stays a
    genuine two-route check rather than one code path fed twice.
    """
    raw = tuple(price_moment(tm, n) for n in range(1, tm.order + 1))
    idx = tuple(index_moment(raw, p_ref, n) for n in range(1, tm.order + 1))
    r = returns_moments((1.0,) + idx)
    route = trade_route_returns_moments(tm, p_ref)

    variance: float | None = None
    skewness: float | None = None
    kurtosis: float | None = None
    if tm.order >= 2:
        variance = r[1] - flip("returns-volatility-scaling") * r[0] ** 2
        if tm.order >= 3:
            scale2 = idx[0] ** 2 + abs(variance)
            if variance <= SHAPE_DEGENERACY_TOL * scale2:
                msg = f"returns variance {variance:.3e} too small for shape statistics"
                if on_degenerate == "raise":
                    raise DegenerateDistributionError(msg)
            else:
                third = r[2] - 3.0 * r[0] * r[1] + flip("returns-skewness-invariance") * 2.0 * r[0] ** 3
                skewness = third / variance**1.5
                if tm.order >= 4:
                    fourth = (
                        r[3]
                        - 4.0 * r[0] * r[2]
                        + flip("returns-kurtosis-invariance") * 6.0 * r[0] ** 2 * r[1]
                        - 3.0 * r[0] ** 4
                    )
                    kurtosis = fourth / variance**2
    return ReturnsStats(
        ref_price=float(p_ref),
        order=tm.order,
        index_moments=idx,
        moments=r,
        trade_route_moments=route,
        variance=variance,
        skewness=skewness,
        kurtosis=kurtosis,
    )


def returns_shape_stats(rs: ReturnsStats, ps: PriceStats) -> ReturnsShapeCheck:
    """Returns shape statistics with residuals against the price-side stats.

    Scale-free statistics are compared with max(1, |price value|) in the
    denominator so symmetric distributions (skewness ~ 0) stay testable.
    """
    if rs.variance is None or ps.order < 2:
        raise ValueError("shape check needs order >= 2 on both sides")
    # degenerate windows have zero variance on both sides; fall back to the
    # squared mean price so the residual stays finite and the identity testable
    vol_scale = abs(ps.variance) if ps.variance != 0.0 else ps.raw_moments[0] ** 2
    vol_res = abs(rs.ref_price**2 * rs.variance - ps.variance) / vol_scale
    sk_res = None
    if rs.skewness is not None and ps.skewness is not None:
        sk_res = abs(rs.skewness - ps.skewness) / max(1.0, abs(ps.skewness))
    ku_res = None
    if rs.kurtosis is not None and ps.kurtosis is not None:
        ku_res = abs(rs.kurtosis - ps.kurtosis) / max(1.0, abs(ps.kurtosis))
    return ReturnsShapeCheck(
        skewness=rs.skewness,
        kurtosis=rs.kurtosis,
        volatility_residual=vol_res,
        skewness_residual=sk_res,
        kurtosis_residual=ku_res,
    )


def trade_indices(base: TradeMoments, later: TradeMoments, n: int) -> tuple[float, float]:
    """Trade value/volume growth indices (c[n], u[n]) of later against base."""
    if not 1 <= n <= min(base.order, later.order):
        raise ValueError(f"moment order {n} outside 1..{min(base.order, later.order)}")
    c = later.value_moment(n) / base.value_moment(1) ** n
    u = later.volume_moment(n) / base.volume_moment(1) ** n
    return c, u


def inflation_stats(base: TradeMoments, later: TradeMoments, order: int) -> InflationStats:
    """Inflation moments via the mean-price route and the trade-index route.

    Both routes are reported with their per-order agreement residuals; the
    volatility identity sigma_In^2 = sigma_p^2(later)/p_base[1]^2 is checked
    the same way. Residuals are scaled by the sum of absolute binomial terms
    so they stay meaningful when the inflation moments sit near zero.
    """
    if not 1 <= order <= min(base.order, later.order):
        raise ValueError(f"order {order} outside 1..{min(base.order, later.order)}")
    p_base = price_moment(base, 1)
    later_raw = tuple(price_moment(later, n) for n in range(1, order + 1))
    cs = []
    us = []
    for n in range(1, order + 1):
        c, u = trade_indices(base, later, n)
        cs.append(c)
        us.append(u)

    moments = []
    route = []
    route_residuals = []
    for n in range(1, order + 1):
        total = 0.0
        total_idx = 0.0
        scale = 0.0
        for j in range(n + 1):
            k = n - j
            term = 1.0 if k == 0 else later_raw[k - 1] / p_base**k
            ratio = 1.0 if k == 0 else cs[k - 1] / us[k - 1]
            if k == n:
                ratio *= flip("inflation-index-route")
            w = (-1.0) ** j * comb(n, j)
            total += w * term
            total_idx += w * ratio
            scale += abs(w) * abs(term)
        moments.append(total)
        route.append(total_idx)
        route_residuals.append(abs(total - total_idx) / scale)

    variance = 0.0
    variance_via = 0.0
    vol_residual = 0.0
    if order >= 2:
        variance = moments[1] - flip("inflation-volatility-scaling") * moments[0] ** 2
        central = central_from_raw(later_raw)
        variance_via = central[0] / p_base**2
        vol_residual = abs(variance - variance_via) / abs(variance_via) if variance_via else abs(variance)

    ratio_residuals = []
    for n in range(1, order + 1):
        direct = later_raw[n - 1] / p_base**n
        via = cs[n - 1] / us[n - 1]
        ratio_residuals.append(abs(direct - via) / abs(direct))

    return InflationStats(
        order=order,
        base_mean_price=p_base,
        moments=tuple(moments),
        index_route_moments=tuple(route),
        value_indices=tuple(cs),
        volume_indices=tuple(us),
        variance=variance,
        variance_via_price=variance_via,
        route_residuals=tuple(route_residuals),
        index_ratio_residuals=tuple(ratio_residuals),
        volatility_residual=vol_residual,
    )
