"""Command line interface.

Five subcommands over one input pipeline (CSV file or synthetic spec,
windowed by --delta):

    moments    per-window value/volume/price moment report
    pdf        invert a window's characteristic function to a density grid
    verify     run every identity gate and report residuals
    returns    per-window returns statistics against a reference window
    inflation  inflation statistics of a later window against a base window

Exit codes: 0 success, 1 verification gate failure, 2 input/config error,
3 degenerate data. Reports are deterministic: same input and flags give
byte-identical output. MBP_THREADS > 1 processes windows in a thread pool;
results are assembled in window order so the report does not depend on
scheduling.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import faults
from .charfunc import (
    GridSpec,
    build_charfunc,
    cumulants_from_moments,
    default_cutoff,
    moments_from_pdf,
    negativity_mass,
    pdf_from_charfunc,
)
from .errors import (
    ConfigError,
    DegenerateDistributionError,
    DegenerateWindowError,
    EmptyInputError,
    GridTooNarrowError,
    ParseError,
)
from .moments import price_moment, trade_moments, window_price_stats
from .oracle import SuiteReport, identity_suite
from .report import density_csv, to_json
from .returns_inflation import inflation_stats, returns_shape_stats, returns_stats
from .trade_ingest import (
    SynthConfig,
    missing_window_indices,
    parse_trades,
    partition,
    synth_trades,
)

_DELTA_UNITS = (("ns", 1), ("us", 10**3), ("ms", 10**6), ("h", 3600 * 10**9), ("m", 60 * 10**9), ("s", 10**9))

_SYNTH_KEYS = {
    "count": ("count", int),
    "seed": ("seed", int),
    "start": ("start_time", int),
    "price-mean": ("price_log_mean", float),
    "price-sigma": ("price_log_sigma", float),
    "volume-mean": ("volume_log_mean", float),
    "volume-sigma": ("volume_log_sigma", float),
    "rho": ("log_corr", float),
}

DIVERGENCE_NOTE = (
    "gap = volume-weighted mean price minus frequency mean price, one value per window; "
    "t = mean(gap) / SE with SE = std(gap, ddof=1)/sqrt(windows). With correlated log "
    "price/volume (corr rho, log sigmas s_p and s_u) the population gap is about "
    "mean_price*(exp(rho*s_p*s_u)-1) while SE shrinks as 1/sqrt(trades_per_window*windows); "
    "at rho=0.5, s_p=0.2, s_u=0.5, 2000 trades x 200 windows the expected t is in the "
    "hundreds, so a 5-SE threshold detects the convention split with overwhelming power "
    "and a mixed-up convention (gap ~ 0) fails it."
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one subcommand run needs, resolved from flags."""

    command: str
    input_path: str | None
    synth: SynthConfig | None
    delta: int
    origin: int
    order: int
    orders: tuple[int, ...]
    cf_order: int
    b: float | str
    reg_power: int | str
    x_cutoff: float | None
    grid_points: int
    ref_window: int | None
    ref_price: float | None
    base_window: int | None
    later_window: int | None
    out_dir: str | None
    plot: bool
    inject_fault: str | None


# ---------------------------------------------------------------------------
# flag parsing
# ---------------------------------------------------------------------------


def parse_delta(text: str) -> int:
    """Window width: integer ticks/nanoseconds, or a duration like 60s, 250ms."""
    t = text.strip().lower()
    for suffix, factor in _DELTA_UNITS:
        if t.endswith(suffix):
            num = t[: -len(suffix)].strip()
            try:
                ns = int(num) * factor if num.lstrip("+-").isdigit() else round(float(num) * factor)
            except ValueError:
                raise ConfigError(f"bad window width {text!r}") from None
            if ns <= 0:
                raise ConfigError(f"window width must be positive, got {text!r}")
            return int(ns)
    try:
        ns = int(t)
    except ValueError:
        raise ConfigError(f"bad window width {text!r}") from None
    if ns <= 0:
        raise ConfigError(f"window width must be positive, got {text!r}")
    return ns


def parse_synth_spec(text: str) -> SynthConfig:
    """key=value pairs, e.g. count=5000,seed=7,rho=0.5,price-sigma=0.2."""
    kwargs = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"synth spec entries are key=value, got {part!r}")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in _SYNTH_KEYS:
            known = ", ".join(sorted(_SYNTH_KEYS))
            raise ConfigError(f"unknown synth key {key!r}; known keys: {known}")
        field, conv = _SYNTH_KEYS[key]
        try:
            kwargs[field] = conv(value.strip())
        except ValueError:
            raise ConfigError(f"bad value for synth key {key!r}: {value!r}") from None
    return SynthConfig(**kwargs)


def parse_orders_range(text: str) -> tuple[int, ...]:
    """Order range like 1..4, or a single order."""
    t = text.strip()
    if ".." in t:
        lo_s, _, hi_s = t.partition("..")
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise ConfigError(f"bad order range {text!r}") from None
    else:
        try:
            lo = hi = int(t)
        except ValueError:
            raise ConfigError(f"bad order range {text!r}") from None
    if not 1 <= lo <= hi <= 4:
        raise ConfigError(f"order range must sit within 1..4, got {text!r}")
    return tuple(range(lo, hi + 1))


def _auto_or(value: str, conv):
    v = value.strip().lower()
    if v == "auto":
        return "auto"
    try:
        return conv(v)
    except ValueError:
        raise ConfigError(f"expected a number or 'auto', got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbp",
        description="Market-based price statistics from trade time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", help="trade CSV path (header time,price,volume)")
        p.add_argument("--synth", help="synthetic trades spec, e.g. count=5000,seed=7,rho=0.5")
        p.add_argument("--delta", required=True, help="window width: ticks or duration (60s, 250ms)")
        p.add_argument("--origin", type=int, default=0, help="window grid origin, integer ticks")
        p.add_argument("--order", type=int, default=4, help="maximum moment order (1..4)")
        p.add_argument("--out", help="output directory for reports and figures")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        p.add_argument("--inject-fault", help="test hook: activate a named sign-flip fault")

    p = sub.add_parser("moments", help="per-window moment report")
    common(p)

    p = sub.add_parser("pdf", help="density grid from one window's characteristic function")
    common(p)
    p.add_argument("--cf-order", type=int, default=4, help="approximation order m (1..4)")
    p.add_argument("--b", default="auto", help="regularizer coefficient, or auto")
    p.add_argument("--nreg", default="auto", help="even regularizer exponent, or auto")
    p.add_argument("--xmax", default="auto", help="quadrature cutoff, or auto (40/sigma)")
    p.add_argument("--grid", type=int, default=2**14, help="grid points, power of two")
    p.add_argument("--ref-window", type=int, help="window to invert (default: first)")

    p = sub.add_parser("verify", help="run all identity gates")
    common(p)
    p.add_argument("--orders", help="identity order range, e.g. 1..4 (default: 1..--order)")
    p.add_argument("--ref-window", type=int, help="reference window for returns (default: first)")
    p.add_argument("--base-window", type=int, help="base window for inflation (default: first)")

    p = sub.add_parser("returns", help="per-window returns statistics")
    common(p)
    p.add_argument("--ref-window", type=int, help="reference-price window (default: first)")
    p.add_argument("--ref-price", type=float, help="explicit reference price (overrides --ref-window)")

    p = sub.add_parser("inflation", help="inflation of a later window against a base window")
    common(p)
    p.add_argument("--base-window", type=int, help="base window (default: first)")
    p.add_argument("--later-window", type=int, help="later window (default: last)")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if bool(args.input) == bool(args.synth):
        raise ConfigError("exactly one of --input and --synth is required")
    if not 1 <= args.order <= 4:
        raise ConfigError(f"--order must lie in 1..4, got {args.order}")
    orders = tuple(range(1, args.order + 1))
    if getattr(args, "orders", None):
        orders = parse_orders_range(args.orders)
    cf_order = getattr(args, "cf_order", 4)
    if not 1 <= cf_order <= 4:
        raise ConfigError(f"--cf-order must lie in 1..4, got {cf_order}")
    b = _auto_or(getattr(args, "b", "auto"), float)
    if b != "auto" and not b > 0.0:
        raise ConfigError(f"--b must be positive, got {b}")
    reg_power = _auto_or(getattr(args, "nreg", "auto"), int)
    xmax = _auto_or(getattr(args, "xmax", "auto"), float)
    ref_price = getattr(args, "ref_price", None)
    if ref_price is not None:
        if getattr(args, "ref_window", None) is not None:
            raise ConfigError("--ref-price and --ref-window are mutually exclusive")
        if not ref_price > 0.0:
            raise ConfigError(f"--ref-price must be positive, got {ref_price}")
    return RunConfig(
        command=args.command,
        input_path=args.input,
        synth=parse_synth_spec(args.synth) if args.synth else None,
        delta=parse_delta(args.delta),
        origin=args.origin,
        order=args.order,
        orders=orders,
        cf_order=cf_order,
        b=b,
        reg_power=reg_power,
        x_cutoff=None if xmax == "auto" else float(xmax),
        grid_points=getattr(args, "grid", 2**14),
        ref_window=getattr(args, "ref_window", None),
        ref_price=ref_price,
        base_window=getattr(args, "base_window", None),
        later_window=getattr(args, "later_window", None),
        out_dir=args.out,
        plot=not args.no_plot,
        inject_fault=args.inject_fault,
    )


# ---------------------------------------------------------------------------
# shared pipeline pieces
# ---------------------------------------------------------------------------


def _load_trades(cfg: RunConfig):
    if cfg.input_path is not None:
        try:
            text = Path(cfg.input_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.input_path}: {exc}") from None
        return parse_trades(text)
    return synth_trades(cfg.synth)


def _worker_count() -> int:
    raw = os.environ.get("MBP_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"MBP_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"MBP_THREADS must be >= 1, got {n}")
    return n


def _map_windows(fn, windows):
    # results assembled in window order regardless of scheduling
    workers = _worker_count()
    if workers <= 1 or len(windows) < 2:
        return [fn(w) for w in windows]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, windows))


def _select_window(windows, index: int | None, role: str, default_last: bool = False):
    if index is None:
        return windows[-1] if default_last else windows[0]
    for w in windows:
        if w.index == index:
            return w
    raise ConfigError(f"{role} window {index} not found (non-empty windows: "
                      f"{windows[0].index}..{windows[-1].index})")


def _write_out(cfg: RunConfig, name: str, text: str) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def _common_header(cfg: RunConfig) -> dict:
    src = {"path": cfg.input_path} if cfg.input_path else {
        "count": cfg.synth.count,
        "seed": cfg.synth.seed,
        "price_log_mean": cfg.synth.price_log_mean,
        "price_log_sigma": cfg.synth.price_log_sigma,
        "volume_log_mean": cfg.synth.volume_log_mean,
        "volume_log_sigma": cfg.synth.volume_log_sigma,
        "log_corr": cfg.synth.log_corr,
        "start_time": cfg.synth.start_time,
    }
    return {
        "command": cfg.command,
        "source": src,
        "delta": cfg.delta,
        "origin": cfg.origin,
        "fault": cfg.inject_fault,
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_moments(cfg: RunConfig) -> int:
    windows = partition(_load_trades(cfg), cfg.delta, cfg.origin)

    def row(w):
        base = {"index": w.index, "center": w.center, "count": w.count}
        try:
            tm, ps = window_price_stats(w, cfg.order, on_degenerate="null")
        except DegenerateDistributionError as exc:  # defensive: "null" avoids this
            base["skipped"] = str(exc)
            return base
        base.update(
            value_moments=list(tm.value_moments),
            volume_moments=list(tm.volume_moments),
            inv_volume_moment=tm.inv_volume_moment,
            price_moments=list(ps.raw_moments),
            freq_moments=list(ps.freq_moments),
            variance=ps.variance,
            skewness=ps.skewness,
            kurtosis=ps.kurtosis,
            warnings=list(ps.warnings),
        )
        return base

    rows = _map_windows(row, windows)
    report = _common_header(cfg)
    report.update(
        order=cfg.order,
        window_count=len(windows),
        missing_windows=missing_window_indices(windows),
        windows=rows,
    )
    text = to_json(report)
    sys.stdout.write(text)
    if cfg.out_dir:
        _write_out(cfg, "moments.json", text)
        if cfg.plot:
            from . import plots

            full = [r for r in rows if "skipped" not in r]
            if full:
                plots.render_moments(full, str(Path(cfg.out_dir) / "moments.png"))
    return 0


def cmd_pdf(cfg: RunConfig) -> int:
    if not cfg.out_dir:
        raise ConfigError("pdf writes a density grid; pass --out DIR")
    windows = partition(_load_trades(cfg), cfg.delta, cfg.origin)
    w = _select_window(windows, cfg.ref_window, "target")
    if w.count < 2:
        raise DegenerateWindowError(f"window {w.index} has a single trade; no distribution")
    tm = trade_moments(w, cfg.cf_order)
    raw = [price_moment(tm, n) for n in range(1, cfg.cf_order + 1)]
    cumulants = cumulants_from_moments(raw)
    cf = build_charfunc(cumulants, b=cfg.b, reg_power=cfg.reg_power, x_cutoff=cfg.x_cutoff)
    grid = GridSpec(x_cutoff=cfg.x_cutoff, points=cfg.grid_points)
    pdf = pdf_from_charfunc(cf, grid)
    recovered = [moments_from_pdf(pdf, n) for n in range(1, cf.order + 1)]
    x_used = cfg.x_cutoff if cfg.x_cutoff is not None else default_cutoff(cumulants)

    meta = _common_header(cfg)
    meta.update(
        window={"index": w.index, "center": w.center, "count": w.count},
        order=cf.order,
        input_moments=raw,
        cumulants=list(cf.cumulants),
        regularizer_power=cf.regularizer_power,
        regularizer_coeff=cf.regularizer_coeff,
        grid={
            "x_cutoff": x_used,
            "points": cfg.grid_points,
            "spacing": pdf.spacing,
            "center": cf.cumulants[0],
            "price_min": float(pdf.prices[0]),
            "price_max": float(pdf.prices[-1]),
        },
        normalization=pdf.normalization,
        negativity_mass=negativity_mass(pdf),
        recovered_moments=recovered,
        recovery_residuals=[
            abs(rec - m) / abs(m) for rec, m in zip(recovered, raw)
        ],
        warnings=list(pdf.warnings),
    )
    text = to_json(meta)
    sys.stdout.write(text)
    _write_out(cfg, "pdf.json", text)
    _write_out(cfg, "density.csv", density_csv(pdf.prices, pdf.density))
    if cfg.plot:
        from . import plots

        plots.render_density(pdf.prices, pdf.density, meta, str(Path(cfg.out_dir) / "density.png"))
    return 0


def _identity_summary(suite: SuiteReport) -> list[dict]:
    names: list[str] = []
    for c in suite.checks:
        if c.identity not in names:
            names.append(c.identity)
    out = []
    for name in names:
        rows = [c for c in suite.checks if c.identity == name]
        live = [c for c in rows if c.passed is not None]
        max_res = max((c.residual for c in live), default=None)
        out.append(
            {
                "identity": name,
                "checks": len(rows),
                "skipped": sum(1 for c in rows if c.passed is None),
                "max_residual": max_res,
                "tolerance": live[0].tolerance if live else None,
                "passed": all(c.passed for c in live) if live else None,
            }
        )
    return out


def cmd_verify(cfg: RunConfig) -> int:
    trades = _load_trades(cfg)
    suite = identity_suite(
        trades,
        cfg.delta,
        orders=cfg.orders,
        origin=cfg.origin,
        ref_window=cfg.ref_window,
        base_window=cfg.base_window,
    )
    summary = _identity_summary(suite)
    lines = []
    for s in summary:
        if s["passed"] is None:
            lines.append(f"SKIP {s['identity']}: all {s['checks']} checks skipped")
            continue
        verdict = "PASS" if s["passed"] else "FAIL"
        lines.append(
            f"{verdict} {s['identity']}: max residual {s['max_residual']:.3e} "
            f"(tolerance {s['tolerance']:.0e}, {s['checks']} checks, {s['skipped']} skipped)"
        )
    lines.append(
        f"{'PASS' if suite.passed else 'FAIL'} overall: {len(suite.checks)} checks, "
        f"{suite.failures} failures, {suite.skipped} skipped"
    )
    sys.stdout.write("\n".join(lines) + "\n")

    report = _common_header(cfg)
    report.update(
        orders=list(suite.orders),
        ref_window=suite.ref_window,
        base_window=suite.base_window,
        missing_windows=list(suite.missing_windows),
        identity_summary=summary,
        divergence=(
            None
            if suite.divergence is None
            else {
                "windows": suite.divergence.windows,
                "mean_gap": suite.divergence.mean_gap,
                "se_gap": suite.divergence.se_gap,
                "t_stat": suite.divergence.t_stat,
                "note": DIVERGENCE_NOTE,
            }
        ),
        checks=[
            {
                "identity": c.identity,
                "window": c.window,
                "order": c.order,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "passed": c.passed,
                "detail": c.detail,
            }
            for c in suite.checks
        ],
        summary={
            "checks": len(suite.checks),
            "failures": suite.failures,
            "skipped": suite.skipped,
            "passed": suite.passed,
        },
    )
    if cfg.out_dir:
        _write_out(cfg, "verify.json", to_json(report))
        if cfg.plot:
            from . import plots

            plots.render_verify(summary, str(Path(cfg.out_dir) / "verify.png"))
    return 0 if suite.passed else 1


def cmd_returns(cfg: RunConfig) -> int:
    windows = partition(_load_trades(cfg), cfg.delta, cfg.origin)
    if cfg.ref_price is not None:
        ref_index = None
        p_ref = cfg.ref_price
    else:
        ref = _select_window(windows, cfg.ref_window, "reference")
        ref_index = ref.index
        p_ref = price_moment(trade_moments(ref, 1), 1)

    def row(w):
        tm, ps = window_price_stats(w, cfg.order, on_degenerate="null")
        rs = returns_stats(tm, p_ref, on_degenerate="null")
        base = {
            "index": w.index,
            "center": w.center,
            "count": w.count,
            "index_moments": list(rs.index_moments),
            "moments": list(rs.moments),
            "trade_route_moments": list(rs.trade_route_moments),
            "variance": rs.variance,
            "skewness": rs.skewness,
            "kurtosis": rs.kurtosis,
        }
        if rs.variance is not None:
            shape = returns_shape_stats(rs, ps)
            base["volatility_identity_residual"] = shape.volatility_residual
            base["skewness_identity_residual"] = shape.skewness_residual
            base["kurtosis_identity_residual"] = shape.kurtosis_residual
        else:
            base["volatility_identity_residual"] = None
            base["skewness_identity_residual"] = None
            base["kurtosis_identity_residual"] = None
        base["warnings"] = list(ps.warnings)
        return base

    rows = _map_windows(row, windows)
    report = _common_header(cfg)
    report.update(
        order=cfg.order,
        ref_window=ref_index,
        ref_price=p_ref,
        window_count=len(windows),
        missing_windows=missing_window_indices(windows),
        windows=rows,
    )
    text = to_json(report)
    sys.stdout.write(text)
    if cfg.out_dir:
        _write_out(cfg, "returns.json", text)
        if cfg.plot:
            from . import plots

            plots.render_returns(rows, str(Path(cfg.out_dir) / "returns.png"))
    return 0


def cmd_inflation(cfg: RunConfig) -> int:
    windows = partition(_load_trades(cfg), cfg.delta, cfg.origin)
    base_w = _select_window(windows, cfg.base_window, "base")
    later_w = _select_window(windows, cfg.later_window, "later", default_last=True)
    base_tm = trade_moments(base_w, cfg.order)
    later_tm = trade_moments(later_w, cfg.order)
    infl = inflation_stats(base_tm, later_tm, cfg.order)

    report = _common_header(cfg)
    report.update(
        order=cfg.order,
        base_window=base_w.index,
        later_window=later_w.index,
        base_mean_price=infl.base_mean_price,
        moments=list(infl.moments),
        index_route_moments=list(infl.index_route_moments),
        value_indices=list(infl.value_indices),
        volume_indices=list(infl.volume_indices),
        variance=infl.variance,
        variance_via_price=infl.variance_via_price,
        route_residuals=list(infl.route_residuals),
        index_ratio_residuals=list(infl.index_ratio_residuals),
        volatility_residual=infl.volatility_residual,
    )
    text = to_json(report)
    sys.stdout.write(text)
    if cfg.out_dir:
        _write_out(cfg, "inflation.json", text)
        if cfg.plot:
            from . import plots

            plots.render_inflation(report, str(Path(cfg.out_dir) / "inflation.png"))
    return 0


COMMANDS = {
    "moments": cmd_moments,
    "pdf": cmd_pdf,
    "verify": cmd_verify,
    "returns": cmd_returns,
    "inflation": cmd_inflation,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    try:
        faults.activate(args.inject_fault)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (ParseError, EmptyInputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateWindowError, DegenerateDistributionError, GridTooNarrowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    finally:
        faults.activate(None)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
