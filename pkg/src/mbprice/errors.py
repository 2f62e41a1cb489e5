"""Error types shared across the package.

Exit-code mapping lives in the CLI: input/configuration problems exit 2,
degenerate-data problems exit 3, verification gate failures exit 1.
"""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed input row; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyInputError(ValueError):
    """Input holds a header but no trades."""


class ConfigError(ValueError):
    """Invalid flag value, window spec, or grid spec."""


class DegenerateWindowError(ValueError):
    """Window cannot support the requested computation (e.g. single trade)."""


class DegenerateDistributionError(ValueError):
    """Shape statistics requested while the price variance is ~0 or negative."""


class GridTooNarrowError(ValueError):
    """Quadrature grid does not contain the integrand's support."""
