"""Characteristic-function approximations and Fourier inversion to densities.

With cumulants a[1..m] of the market-based price moments, the approximation
of order m is

    F_m(x) = exp{ sum_{j<=m} (i^j a_j / j!) x^j  -  b x^K },   K even, K > m

where the positive regularizer coefficient b makes F_m integrable without
touching the first m derivatives at 0, so the first m moments of the
inverted density are exactly the input moments. The density is

    eta(p) = (1/2pi) integral F_m(x) exp(-i x p) dx

evaluated by an FFT over a symmetric x grid; the price grid is the conjugate
grid centered at a[1]. For m = 2 and negligible b this reproduces the
Gaussian with mean a[1] and variance a[2] exactly, which pins the 1/(2pi)
normalization.

AUTO policy: the regularizer exponent K is 6 when m = 4 and 4 otherwise; b
solves Re log F_m(x_max) = -40 at the quadrature cutoff so |F_m| <= e^-40 at
truncation, floored at a tiny positive value when the Gaussian factor alone
is already far smaller (b must stay > 0). A positive fourth cumulant also
forces b up to the interior bound a4^2/(576 a2), which keeps
Re log F_m <= -a2 x^2/4 everywhere instead of letting the quartic term open
an overflow ridge between 0 and the cutoff.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DegenerateDistributionError
from .moments import central_from_raw

TAIL_LOG_TARGET = 40.0
REGULARIZER_FLOOR_LOG = 1e-6
DEFAULT_POINTS = 2**14
NORMALIZATION_BAND = (0.999, 1.001)
IMAG_RESIDUE_TOL = 1e-12


def cumulants_from_moments(raw: Sequence[float]) -> tuple[float, ...]:
    """Cumulants a[1..m] from raw moments m1..m4 (m <= 4)."""
    m = len(raw)
    if not 1 <= m <= 4:
        raise ValueError(f"supported orders are 1..4, got {m}")
    out = [float(raw[0])]
    central = central_from_raw(raw)
    if m >= 2:
        out.append(central[0])
    if m >= 3:
        out.append(central[1])
    if m >= 4:
        out.append(central[2] - 3.0 * central[0] ** 2)
    return tuple(out)


def raw_moments_from_cumulants(cumulants: Sequence[float]) -> tuple[float, ...]:
    """Inverse of cumulants_from_moments."""
    m = len(cumulants)
    if not 1 <= m <= 4:
        raise ValueError(f"supported orders are 1..4, got {m}")
    a = tuple(float(v) for v in cumulants)
    out = [a[0]]
    if m >= 2:
        out.append(a[1] + a[0] ** 2)
    if m >= 3:
        out.append(a[2] + 3.0 * a[1] * a[0] + a[0] ** 3)
    if m >= 4:
        out.append(a[3] + 3.0 * a[1] ** 2 + 4.0 * a[2] * a[0] + 6.0 * a[1] * a[0] ** 2 + a[0] ** 4)
    return tuple(out)


@dataclass(frozen=True)
class CharFuncApprox:
    """Order-m characteristic function approximation.

    regularizer_power is the even exponent K > order; regularizer_coeff is
    the positive b.
    """

    order: int
    cumulants: tuple[float, ...]
    regularizer_power: int
    regularizer_coeff: float

    def __post_init__(self):
        if self.order != len(self.cumulants):
            raise ValueError("order must match the number of cumulants")
        if self.regularizer_power % 2 or self.regularizer_power <= self.order:
            raise ValueError(
                f"regularizer power must be even and exceed the order, got {self.regularizer_power}"
            )
        if not self.regularizer_coeff > 0.0:
            raise ValueError(f"regularizer coefficient must be positive, got {self.regularizer_coeff}")


@dataclass(frozen=True)
class GridSpec:
    """Quadrature grid: x cutoff (None = AUTO 40/sigma) and point count."""

    x_cutoff: float | None = None
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.x_cutoff is not None and not self.x_cutoff > 0.0:
            raise ConfigError(f"x cutoff must be positive, got {self.x_cutoff}")
        p = self.points
        if p < 4 or p & (p - 1):
            raise ConfigError(f"point count must be a power of two >= 4, got {p}")


@dataclass(frozen=True)
class PdfGrid:
    """Density sampled on a uniform price grid."""

    prices: np.ndarray
    density: np.ndarray
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        prices = np.ascontiguousarray(self.prices, dtype=np.float64)
        density = np.ascontiguousarray(self.density, dtype=np.float64)
        if prices.shape != density.shape or prices.ndim != 1 or prices.size < 2:
            raise ValueError("prices and density must be equal-length 1-D arrays")
        prices.setflags(write=False)
        density.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "density", density)

    @property
    def spacing(self) -> float:
        return float(self.prices[1] - self.prices[0])

    @property
    def normalization(self) -> float:
        return float(np.trapezoid(self.density, dx=self.spacing))


def default_cutoff(cumulants: Sequence[float]) -> float:
    """AUTO x cutoff: 40 over the distribution scale sqrt(a[2])."""
    if len(cumulants) >= 2 and cumulants[1] > 0.0:
        return TAIL_LOG_TARGET / math.sqrt(cumulants[1])
    raise ConfigError("AUTO x cutoff needs a positive second cumulant; pass one explicitly")


def build_charfunc(
    cumulants: Sequence[float],
    b: float | str = "auto",
    reg_power: int | str = "auto",
    x_cutoff: float | None = None,
) -> CharFuncApprox:
    """Assemble the approximation, solving for AUTO parameters.

    AUTO reg_power: 6 for order 4, else 4. AUTO b: solve
    Re log F_m(x_max) = -40 at x_max (given or AUTO), floored at a positive
    value whose tail contribution is e^-1e-6 when the polynomial part is
    already below -40 on its own, and lifted to the interior no-overflow
    bound when the fourth cumulant is positive.
    """
    a = tuple(float(v) for v in cumulants)
    m = len(a)
    if not 1 <= m <= 4:
        raise ValueError(f"supported orders are 1..4, got {m}")
    if m >= 2 and a[1] <= 0.0:
        raise DegenerateDistributionError(
            f"second cumulant must be positive to build a density, got {a[1]}"
        )
    if m == 1:
        _warnings.warn(
            "order-1 approximation: the density shape is set by the regularizer, "
            "not the data",
            RuntimeWarning,
            stacklevel=2,
        )
    if reg_power == "auto":
        power = 6 if m == 4 else 4
    else:
        power = int(reg_power)
    if b == "auto":
        x_max = x_cutoff if x_cutoff is not None else default_cutoff(a)
        re_poly = -0.5 * (a[1] if m >= 2 else 0.0) * x_max**2
        if m >= 4:
            re_poly += a[3] * x_max**4 / 24.0
        solved = (TAIL_LOG_TARGET + re_poly) / x_max**power
        coeff = max(solved, REGULARIZER_FLOOR_LOG / x_max**power)
        if m >= 4 and a[3] > 0.0:
            # Positive fourth cumulant: +a4 x^4/24 outgrows the Gaussian
            # factor long before the cutoff, so the boundary solve alone
            # leaves an interior ridge where |F| overflows. Lift b until
            # a4 x^4/24 - b x^K <= a2 x^2/4 for every x, which caps
            # Re log F at -a2 x^2/4 <= 0 (closed form for K = 6; a grid
            # bound covers explicitly chosen powers).
            if power == 6:
                coeff = max(coeff, a[3] ** 2 / (576.0 * a[1]))
            else:
                xs = np.linspace(x_max / 4096.0, x_max, 4096)
                excess = a[3] * xs**4 / 24.0 - 0.25 * a[1] * xs**2
                coeff = max(coeff, float(np.max(excess / xs**power)))
    else:
        coeff = float(b)
    return CharFuncApprox(order=m, cumulants=a, regularizer_power=power, regularizer_coeff=coeff)


def eval_charfunc(cf: CharFuncApprox, x: np.ndarray, mode: str = "regularized") -> np.ndarray:
    """Evaluate F_m on `x`.

    mode "regularized" is the exponential form with the b x^K damping; mode
    "taylor" is the plain degree-m Taylor polynomial of the characteristic
    function, 1 + sum i^n m_n x^n / n!, kept as a diagnostic of how fast the
    two agree near 0 (they match to O(x^{m+1})).
    """
    x = np.asarray(x, dtype=np.float64)
    if mode == "regularized":
        exponent = np.zeros(x.shape, dtype=np.complex128)
        for j, a_j in enumerate(cf.cumulants, start=1):
            exponent += (1j**j) * a_j / math.factorial(j) * x**j
        exponent -= cf.regularizer_coeff * x.astype(np.complex128) ** cf.regularizer_power
        return np.exp(exponent)
    if mode == "taylor":
        raw = raw_moments_from_cumulants(cf.cumulants)
        out = np.ones(x.shape, dtype=np.complex128)
        for n, m_n in enumerate(raw, start=1):
            out += (1j**n) * m_n / math.factorial(n) * x**n
        return out
    raise ValueError(f"unknown mode {mode!r}")


def price_grid(center: float, x_max: float, points: int) -> tuple[np.ndarray, float]:
    """Conjugate price grid: spacing pi/x_max, `points` samples around center."""
    dp = math.pi / x_max
    idx = np.arange(points) - points // 2
    return center + idx * dp, dp


def pdf_from_charfunc(cf: CharFuncApprox, grid: GridSpec = GridSpec()) -> PdfGrid:
    """Invert F_m to a density on the conjugate grid centered at a[1].

    One radix-2 FFT over the symmetric x grid evaluates the 1/(2pi) Fourier
    integral at every price point; the imaginary residue (zero in exact
    arithmetic by conjugate symmetry) is checked against 1e-12 relative, and
    a normalization outside [0.999, 1.001] attaches a quality warning.
    """
    x_max = grid.x_cutoff if grid.x_cutoff is not None else default_cutoff(cf.cumulants)
    points = grid.points
    dx = 2.0 * x_max / points
    x = (np.arange(points) - points // 2) * dx
    center = cf.cumulants[0]

    with np.errstate(over="ignore"):
        f_vals = eval_charfunc(cf, x)
    if not np.isfinite(f_vals).all():
        raise ConfigError(
            "characteristic function overflows on the quadrature grid; "
            "increase the regularizer coefficient or its power"
        )
    warn: list[str] = []
    edge = max(abs(f_vals[0]), abs(f_vals[-1]))
    if edge > math.exp(-30.0):
        warn.append(
            f"characteristic function magnitude {edge:.3e} at the cutoff; "
            "increase the cutoff or the regularizer"
        )

    # eta(p_j) = dx/(2pi) * (-1)^j * FFT[F(x_l) e^{-i x_l center} (-1)^l]_j
    # for p_j = center + (j - P/2) * pi/x_max; requires P divisible by 4.
    signs = np.where(np.arange(points) % 2, -1.0, 1.0)
    spectrum = np.fft.fft(f_vals * np.exp(-1j * x * center) * signs)
    raw = dx / (2.0 * math.pi) * signs * spectrum

    scale = float(np.max(np.abs(raw.real))) or 1.0
    residue = float(np.max(np.abs(raw.imag))) / scale
    if residue > IMAG_RESIDUE_TOL:
        warn.append(f"imaginary residue {residue:.3e} above {IMAG_RESIDUE_TOL:.0e}")

    prices, dp = price_grid(center, x_max, points)
    density = np.ascontiguousarray(raw.real)
    norm = float(np.trapezoid(density, dx=dp))
    if not NORMALIZATION_BAND[0] <= norm <= NORMALIZATION_BAND[1]:
        warn.append(f"normalization {norm:.6f} outside {NORMALIZATION_BAND}")
    return PdfGrid(prices=prices, density=density, warnings=tuple(warn))


def gaussian_pdf_closed(mean: float, variance: float, grid: GridSpec = GridSpec()) -> PdfGrid:
    """Closed-form Gaussian on the same conjugate grid construction.

    This is the exact order-2 limit (negligible regularizer) and the
    reference for inversion accuracy checks.
    """
    if not variance > 0.0:
        raise DegenerateDistributionError(f"variance must be positive, got {variance}")
    x_max = grid.x_cutoff if grid.x_cutoff is not None else TAIL_LOG_TARGET / math.sqrt(variance)
    prices, _ = price_grid(mean, x_max, grid.points)
    z = (prices - mean) / math.sqrt(variance)
    density = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi * variance)
    return PdfGrid(prices=prices, density=density)


def moments_from_pdf(grid: PdfGrid, n: int) -> float:
    """n-th raw moment of the density by trapezoidal quadrature (n <= 4)."""
    if not 0 <= n <= 4:
        raise ValueError(f"supported orders are 0..4, got {n}")
    return float(np.trapezoid(grid.prices**n * grid.density, dx=grid.spacing))


def negativity_mass(grid: PdfGrid) -> float:
    """Total mass of the density's negative excursions: sum max(0, -eta) dp."""
    return float(np.sum(np.maximum(0.0, -grid.density)) * grid.spacing)
