"""Market-based price statistics from trade time series.

Volume-weighted price moments, covariance identities between price and
volume powers, characteristic-function density approximations with Fourier
inversion, returns and inflation measures, and a brute-force verification
suite over all of it.
"""

from .charfunc import (
    CharFuncApprox,
    GridSpec,
    PdfGrid,
    build_charfunc,
    cumulants_from_moments,
    eval_charfunc,
    gaussian_pdf_closed,
    moments_from_pdf,
    negativity_mass,
    pdf_from_charfunc,
    raw_moments_from_cumulants,
)
from .correlations import (
    CorrReport,
    correlation_report,
    pearson_correlation,
    power_product_covariance,
    price2_volume_covariance,
    price_volume2_covariance,
    value_volume_covariance,
)
from .errors import (
    ConfigError,
    DegenerateDistributionError,
    DegenerateWindowError,
    EmptyInputError,
    GridTooNarrowError,
    ParseError,
)
from .moments import (
    PriceStats,
    TradeMoments,
    frequency_moment,
    price_central_stats,
    price_moment,
    trade_moments,
    window_price_stats,
)
from .oracle import (
    JointLogGrid,
    LogPriceDensity,
    SuiteReport,
    gaussian_joint_grid,
    identity_suite,
    logprice_moment,
    logprice_pdf,
    verify_factorization,
)
from .returns_inflation import (
    InflationStats,
    ReturnsStats,
    index_moment,
    inflation_stats,
    returns_moments,
    returns_shape_stats,
    returns_stats,
    trade_indices,
    trade_route_returns_moments,
)
from .trade_ingest import (
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

__version__ = "0.1.0"

__all__ = [
    "CharFuncApprox",
    "ConfigError",
    "CorrReport",
    "DegenerateDistributionError",
    "DegenerateWindowError",
    "EmptyInputError",
    "GridSpec",
    "GridTooNarrowError",
    "InflationStats",
    "JointLogGrid",
    "LogPriceDensity",
    "ParseError",
    "PdfGrid",
    "PriceStats",
    "ReturnsStats",
    "SuiteReport",
    "SynthConfig",
    "Trade",
    "TradeMoments",
    "Window",
    "build_charfunc",
    "correlation_report",
    "cumulants_from_moments",
    "emit_trades",
    "eval_charfunc",
    "frequency_moment",
    "gaussian_joint_grid",
    "gaussian_pdf_closed",
    "identity_suite",
    "index_moment",
    "inflation_stats",
    "logprice_moment",
    "logprice_pdf",
    "missing_window_indices",
    "moments_from_pdf",
    "negativity_mass",
    "parse_trades",
    "partition",
    "pdf_from_charfunc",
    "pearson_correlation",
    "power_product_covariance",
    "price2_volume_covariance",
    "price_central_stats",
    "price_moment",
    "price_volume2_covariance",
    "raw_moments_from_cumulants",
    "returns_moments",
    "returns_shape_stats",
    "returns_stats",
    "synth_columns",
    "synth_trades",
    "trade_indices",
    "trade_moments",
    "trade_route_returns_moments",
    "value_volume_covariance",
    "verify_factorization",
    "window_index",
    "window_price_stats",
]
