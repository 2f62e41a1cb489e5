"""Figure rendering for report directories.

Each subcommand writes one PNG next to its delimited output when an output
directory is given. Figures are presentation copies of the report data; the
JSON/CSV stay the authoritative record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _despine(ax):
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def render_moments(win_rows: list[dict], path: str) -> None:
    ks = [r["index"] for r in win_rows]
    vwap = [r["price_moments"][0] for r in win_rows]
    freq = [r["freq_moments"][0] for r in win_rows]
    var = [r["variance"] for r in win_rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(ks, vwap, "o-", ms=3, lw=1, label="volume-weighted mean")
    ax1.plot(ks, freq, "s--", ms=3, lw=1, label="frequency mean")
    ax1.set_ylabel("mean price")
    ax1.legend(frameon=False, fontsize=8)
    ax2.plot(ks, var, "o-", ms=3, lw=1, color="tab:red")
    ax2.set_ylabel("price variance")
    ax2.set_xlabel("window index")
    for ax in (ax1, ax2):
        _despine(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_density(prices, density, meta: dict, path: str) -> None:
    prices = np.asarray(prices)
    density = np.asarray(density)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(prices, density, lw=1.2, color="tab:blue")
    neg = density < 0
    if neg.any():
        ax.fill_between(prices, density, 0, where=neg, color="tab:red", alpha=0.5,
                        label=f"negative mass {meta.get('negativity_mass', 0):.2e}")
        ax.legend(frameon=False, fontsize=8)
    ax.axvline(meta["cumulants"][0], color="gray", lw=0.8, ls=":")
    ax.axhline(0.0, color="gray", lw=0.6)
    sigma = meta["cumulants"][1] ** 0.5 if len(meta["cumulants"]) > 1 else None
    if sigma:
        lo = meta["cumulants"][0] - 8 * sigma
        hi = meta["cumulants"][0] + 8 * sigma
        ax.set_xlim(lo, hi)
    ax.set_xlabel("price")
    ax.set_ylabel("density")
    ax.set_title(f"order-{meta['order']} density, normalization {meta['normalization']:.6f}",
                 fontsize=10)
    _despine(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_verify(identity_summary: list[dict], path: str) -> None:
    rows = [r for r in identity_summary if r["max_residual"] is not None]
    names = [r["identity"] for r in rows]
    # residual as fraction of tolerance; boolean gates plot at their raw value
    ratios = [
        r["max_residual"] / r["tolerance"] if r["tolerance"] > 0 else r["max_residual"] + 1e-300
        for r in rows
    ]
    colors = ["tab:green" if r["passed"] else "tab:red" for r in rows]
    fig, ax = plt.subplots(figsize=(8, 0.45 * max(4, len(names))))
    y = np.arange(len(names))
    ax.barh(y, np.maximum(ratios, 1e-300), color=colors, height=0.6)
    ax.axvline(1.0, color="black", lw=1, ls="--", label="tolerance")
    ax.set_yticks(y, names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("max residual / tolerance")
    ax.legend(frameon=False, fontsize=8)
    ax.invert_yaxis()
    _despine(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_returns(win_rows: list[dict], path: str) -> None:
    ks = [r["index"] for r in win_rows]
    r1 = [r["moments"][0] for r in win_rows]
    var = [r["variance"] for r in win_rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(ks, r1, "o-", ms=3, lw=1)
    ax1.axhline(0.0, color="gray", lw=0.6)
    ax1.set_ylabel("mean return")
    ax2.plot(ks, var, "o-", ms=3, lw=1, color="tab:red")
    ax2.set_ylabel("returns variance")
    ax2.set_xlabel("window index")
    for ax in (ax1, ax2):
        _despine(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_inflation(report: dict, path: str) -> None:
    orders = np.arange(1, report["order"] + 1)
    width = 0.27
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(orders - width, report["moments"], width, label="inflation moments")
    ax.bar(orders, report["value_indices"], width, label="value growth index")
    ax.bar(orders + width, report["volume_indices"], width, label="volume growth index")
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_xticks(orders)
    ax.set_xlabel("order")
    ax.legend(frameon=False, fontsize=8)
    _despine(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
