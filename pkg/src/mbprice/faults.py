"""Sign-flip fault injection for identity implementations.

Test hook: activating `sign-flip-<identity>` makes that identity's shipped
expression use a flipped sign on one term, simulating an implementation bug.
Production behavior is untouched while no fault is active. The registry below
is the authoritative list of mutable identities; the verification gate is
required to catch every one of them.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar

IDENTITIES = (
    "zero-correlation",
    "price-volume2-covariance",
    "price2-volume-covariance",
    "value-factorization",
    "returns-route-agreement",
    "returns-volatility-scaling",
    "returns-skewness-invariance",
    "returns-kurtosis-invariance",
    "inflation-index-route",
    "inflation-volatility-scaling",
)

FAULT_NAMES = tuple(f"sign-flip-{name}" for name in IDENTITIES)

_ACTIVE: ContextVar[str | None] = ContextVar("mbprice_active_fault", default=None)


def activate(fault: str | None) -> None:
    if fault is not None and fault not in FAULT_NAMES:
        known = ", ".join(FAULT_NAMES)
        raise ValueError(f"unknown fault {fault!r}; known faults: {known}")
    _ACTIVE.set(fault)


def active() -> str | None:
    return _ACTIVE.get()


def flip(identity: str) -> float:
    """-1.0 when the sign-flip fault for `identity` is active, else +1.0."""
    return -1.0 if _ACTIVE.get() == f"sign-flip-{identity}" else 1.0


@contextmanager
def injected(fault: str | None):
    token = _ACTIVE.set(None)
    try:
        activate(fault)
        yield
    finally:
        _ACTIVE.reset(token)
