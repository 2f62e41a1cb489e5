"""Covariances between powers of price and volume within one window.

The volume-power weighting makes same-order price/volume powers uncorrelated
by construction:

    corr{p^n U^n} = E[p^n U^n] - p[n] U[n] = 0      (up to rounding)

because p[n] is defined as E[p^n U^n]/U[n]. Mixed orders do not vanish; the
two lowest are computed both directly and through value/volume covariances:

    corr{p U^2} = corr{C U} - p[1] sigma^2(U)
    corr{p^2 U} = corr{C^2 U^-1} + p[2] (U[2] U(-1) - U[1])

with corr{C U} = E[C U] - C[1] U[1] and
corr{C^2 U^-1} = E[C^2 / U] - C[2] U(-1). The sign of corr{p U^2} therefore
matches the sign of corr{C U} - p[1] sigma^2(U) window by window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accum import comp_mean, comp_sum_rows
from .faults import flip
from .moments import TradeMoments, power_columns, price_moment
from .trade_ingest import Window

# |x| below SIGN_DEADBAND * scale counts as zero in sign-consistency checks
SIGN_DEADBAND = 1e-12


@dataclass(frozen=True)
class CorrReport:
    """All covariance diagnostics of one window.

    power_covariances[n-1] is corr{p^n U^n} (zero by construction); the
    *_scale fields hold the raw mixed moments E[p U^2] and E[p^2 U] that set
    the natural magnitude for residual comparisons.
    """

    order: int
    power_covariances: tuple[float, ...]
    price_volume2_direct: float
    price_volume2_via: float
    price2_volume_direct: float
    price2_volume_via: float
    value_volume_covariance: float
    volume_variance: float
    price_volume2_scale: float
    price2_volume_scale: float

    @property
    def sign_consistent(self) -> bool:
        """corr{p U^2} > 0 iff corr{C U} > p[1] sigma^2(U).

        The right-hand quantity is exactly the via form; signs are compared
        with a rounding deadband, and windows where the two computations sit
        inside the deadband of each other never count as inconsistent.
        """
        tol = SIGN_DEADBAND * abs(self.price_volume2_scale)
        lhs = _sign(self.price_volume2_direct, tol)
        rhs = _sign(self.price_volume2_via, tol)
        return lhs == rhs or abs(self.price_volume2_direct - self.price_volume2_via) <= tol


def _sign(x: float, tol: float) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def power_product_covariance(w: Window, tm: TradeMoments, n: int) -> float:
    """corr{p^n U^n} = E[p^n U^n] - p[n] U[n]; zero up to rounding."""
    # powers built the same way as in correlation_report (cumulative
    # multiplication), so the two entry points agree bit for bit
    p_n = power_columns(w.prices, n)[n - 1]
    u_n = power_columns(w.volumes, n)[n - 1]
    mixed = comp_mean(p_n * u_n)
    return mixed - flip("zero-correlation") * price_moment(tm, n) * tm.volume_moment(n)


def price_volume2_covariance(w: Window, tm: TradeMoments) -> tuple[float, float]:
    """corr{p U^2} computed directly and via corr{C U} - p[1] sigma^2(U)."""
    direct = comp_mean(w.prices * w.volumes**2) - price_moment(tm, 1) * tm.volume_moment(2)
    cov_cu = value_volume_covariance(w, tm)
    vol_var = tm.volume_moment(2) - tm.volume_moment(1) ** 2
    via = cov_cu - flip("price-volume2-covariance") * price_moment(tm, 1) * vol_var
    return direct, via


def price2_volume_covariance(w: Window, tm: TradeMoments) -> tuple[float, float]:
    """corr{p^2 U} computed directly and via corr{C^2 U^-1}."""
    direct = comp_mean(w.prices**2 * w.volumes) - price_moment(tm, 2) * tm.volume_moment(1)
    cov_c2 = comp_mean(w.values**2 / w.volumes) - tm.value_moment(2) * tm.inv_volume_moment
    bias = tm.volume_moment(2) * tm.inv_volume_moment - tm.volume_moment(1)
    via = cov_c2 + flip("price2-volume-covariance") * price_moment(tm, 2) * bias
    return direct, via


def value_volume_covariance(w: Window, tm: TradeMoments) -> float:
    """corr{C U} = E[C U] - C[1] U[1]."""
    return comp_mean(w.values * w.volumes) - tm.value_moment(1) * tm.volume_moment(1)


def correlation_report(w: Window, tm: TradeMoments) -> CorrReport:
    """Every covariance diagnostic in one stacked compensated pass.

    Bit-identical to calling the individual functions: the compensated tree
    reduces each row independently.
    """
    order = tm.order
    if order < 2:
        raise ValueError("correlation report needs order >= 2")
    p_pow = power_columns(w.prices, order)
    u_pow = power_columns(w.volumes, order)
    rows = np.empty((order + 4, w.count))
    np.multiply(p_pow, u_pow, out=rows[0:order])  # p^n u^n
    np.multiply(w.prices, w.volumes**2, out=rows[order])
    np.multiply(w.prices**2, w.volumes, out=rows[order + 1])
    np.multiply(w.values, w.volumes, out=rows[order + 2])
    np.divide(w.values**2, w.volumes, out=rows[order + 3])
    means = comp_sum_rows(rows) / w.count

    p1 = price_moment(tm, 1)
    p2 = price_moment(tm, 2)
    s_flip = flip("zero-correlation")
    power_covs = tuple(
        means[n - 1] - s_flip * price_moment(tm, n) * tm.volume_moment(n)
        for n in range(1, order + 1)
    )
    e_pu2, e_p2u, e_cu, e_c2inv = means[order : order + 4]
    cov_cu = e_cu - tm.value_moment(1) * tm.volume_moment(1)
    vol_var = tm.volume_moment(2) - tm.volume_moment(1) ** 2
    cov_c2 = e_c2inv - tm.value_moment(2) * tm.inv_volume_moment
    bias = tm.volume_moment(2) * tm.inv_volume_moment - tm.volume_moment(1)
    return CorrReport(
        order=order,
        power_covariances=power_covs,
        price_volume2_direct=e_pu2 - p1 * tm.volume_moment(2),
        price_volume2_via=cov_cu - flip("price-volume2-covariance") * p1 * vol_var,
        price2_volume_direct=e_p2u - p2 * tm.volume_moment(1),
        price2_volume_via=cov_c2 + flip("price2-volume-covariance") * p2 * bias,
        value_volume_covariance=cov_cu,
        volume_variance=vol_var,
        price_volume2_scale=float(e_pu2),
        price2_volume_scale=float(e_p2u),
    )


def pearson_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Normalized Pearson correlation; diagnostic only, not used by the
    identities (which are covariance statements)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    am = comp_mean(a)
    bm = comp_mean(b)
    cov = comp_mean((a - am) * (b - bm))
    sa = comp_mean((a - am) ** 2)
    sb = comp_mean((b - bm) ** 2)
    denom = np.sqrt(sa * sb)
    if denom == 0.0:
        return 0.0
    return float(cov / denom)
