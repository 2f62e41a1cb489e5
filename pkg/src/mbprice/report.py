"""Deterministic report serialization.

Reports must be byte-identical across runs for the same input and config:
keys keep insertion order, floats print with %.17g (17 significant digits,
enough to round-trip any binary double), and nothing time- or
environment-dependent is ever emitted.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} cannot appear in a report")
    return format(x, ".17g")


def to_json(obj: Any, indent: int = 2) -> str:
    """JSON text with deterministic float formatting; insertion order kept."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    out.append("\n")
    return "".join(out)


def _emit(obj: Any, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(_quote(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad)
            out.append(_quote(str(k)))
            out.append(": ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(close_pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(close_pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _quote(s: str) -> str:
    escaped = (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    cleaned = []
    for ch in escaped:
        cleaned.append(ch if ord(ch) >= 0x20 else f"\\u{ord(ch):04x}")
    return '"' + "".join(cleaned) + '"'


def density_csv(prices: np.ndarray, density: np.ndarray) -> str:
    """Plot-ready price,density grid at full precision."""
    lines = ["price,density"]
    lines.extend(
        f"{format_float(p)},{format_float(d)}" for p, d in zip(prices, density)
    )
    return "\n".join(lines) + "\n"
