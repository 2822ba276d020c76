"""Command-line front end: parameter scans and machine-readable output.

Four subcommands emit figure-ready tables:

* ``scan-theta``          linewidth routes vs the pump parameter theta
* ``fock-resolved``       per-photon-number linewidth weights and statistics
* ``spectrum``            correlation function, spectrum, FWHM
* ``uniform-convergence`` uniform-approximation orders vs the exact line

Configuration comes from an optional JSON file (--config) with individual
flags overriding single fields; the fully resolved configuration is echoed
into every output so runs are reproducible byte for byte.  Output is CSV
(RFC-4180-style quoting, 17 significant digits) or JSON.  Cells are never
NaN/Inf: undefined values are left empty and flagged in the status column.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .averages import TrigAverages
from .errors import ConfigError, MaserlineError, VacuumStateError
from .linewidth import (
    fock_resolved_weights,
    linewidth_components,
    linewidth_exp_closed,
    linewidth_exp_scully,
    linewidth_mcgowan,
    linewidth_scully,
    schawlow_townes_ratio,
)
from .model import ExponentialTau, FixedTau, MaserParams
from .regression import (
    build_sideband_generator,
    correlate,
    initial_sideband,
    linewidth_from_slope,
    spectral_decomposition,
    spectrum_and_fwhm,
)
from .steady import steady_state, steady_state_exp
from .uniform import build_uniform_lindblad, uniform_linewidth, uniform_steady_state

THRESHOLD_THETA_BAR = 1.0 / math.sqrt(2.0)

_CONFIG_FIELDS = {
    "kappa": 1.0,
    "nth": 0.0,
    "rate": 0.0,
    "g_tau": None,
    "dist": "fixed",
    "scan": None,
    "min": None,
    "max": None,
    "steps": 50,
    "trunc": None,
    "nodes": None,
    "orders": "1,0;3,2;7,6",
    "out": None,
    "format": "csv",
    "jobs": 1,
}


def _load_config(args: argparse.Namespace) -> dict:
    resolved = dict(_CONFIG_FIELDS)
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        unknown = set(file_cfg) - set(_CONFIG_FIELDS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(file_cfg)
    for key in _CONFIG_FIELDS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            resolved[key] = value
    return resolved


def _params_from_config(cfg: dict, g_tau: float | None = None) -> MaserParams:
    g_tau = g_tau if g_tau is not None else cfg["g_tau"]
    if g_tau is None:
        raise ConfigError("g_tau is required (flag --g-tau or config)")
    dist = FixedTau(1.0) if cfg["dist"] == "fixed" else ExponentialTau(1.0)
    if cfg["dist"] not in ("fixed", "exp"):
        raise ConfigError(f"dist must be 'fixed' or 'exp', got {cfg['dist']!r}")
    # tau is fixed to one cavity lifetime; g carries the whole product
    return MaserParams(
        kappa=float(cfg["kappa"]),
        n_th=float(cfg["nth"]),
        r=float(cfg["rate"]),
        g=float(g_tau) * float(cfg["kappa"]),
        tau_dist=dist.scaled(1.0 / float(cfg["kappa"])),
    )


def _scan_range(cfg: dict, default_min: float, default_max: float) -> np.ndarray:
    lo = float(cfg["min"]) if cfg["min"] is not None else default_min
    hi = float(cfg["max"]) if cfg["max"] is not None else default_max
    steps = int(cfg["steps"])
    if steps < 1:
        raise ConfigError(f"steps must be at least 1, got {steps}")
    if steps > 1 and not lo < hi:
        raise ConfigError(f"scan range needs min < max, got [{lo}, {hi}]")
    return np.linspace(lo, hi, steps)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_rows(cfg: dict, header_meta: dict, columns: list[str], rows: list[dict], stream) -> None:
    # the destination path is the one field that may differ between
    # otherwise identical runs; leaving it out keeps outputs byte-identical
    echoed = {k: v for k, v in cfg.items() if k != "out"}
    meta = {"tool": "maserline", "version": __version__, "config": echoed, **header_meta}
    if cfg["format"] == "json":
        json.dump({"metadata": meta, "rows": rows}, stream, indent=1, default=_fmt)
        stream.write("\n")
        return
    stream.write("# " + json.dumps(meta, default=_fmt) + "\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for col in columns:
            cell = _fmt(row.get(col))
            if "," in cell or '"' in cell:
                cell = '"' + cell.replace('"', '""') + '"'
            cells.append(cell)
        stream.write(",".join(cells) + "\n")


def _emit(cfg: dict, header_meta: dict, columns: list[str], rows: list[dict]) -> None:
    for row in rows:
        for col in columns:
            value = row.get(col)
            if isinstance(value, float) and not math.isfinite(value):
                raise MaserlineError(f"non-finite cell {col}={value}; refusing to write")
    if cfg["out"]:
        with open(cfg["out"], "w", newline="") as fh:
            _write_rows(cfg, header_meta, columns, rows, fh)
    else:
        _write_rows(cfg, header_meta, columns, rows, sys.stdout)


# -- scan-theta -------------------------------------------------------------

SCAN_THETA_COLUMNS = [
    "theta", "g_tau", "n_mean", "D_main", "D_thermal", "D_cos", "D_sin",
    "D_scully", "D_mcgowan", "D_slope", "st_ratio", "st_ref", "status",
]


def _scan_theta_row(task) -> dict:
    cfg, theta_over_pi = task
    theta = theta_over_pi * math.pi
    rate = float(cfg["rate"])
    kappa = float(cfg["kappa"])
    if rate > 0:
        g_tau = theta / math.sqrt(rate / kappa)
    else:
        g_tau = float(cfg["g_tau"] or 1.0)
    params = _params_from_config(cfg, g_tau=g_tau)
    row = {"theta": theta, "g_tau": g_tau, "status": "ok"}
    stats = steady_state(params, cfg["trunc"])
    row["n_mean"] = stats.mean
    try:
        breakdown = linewidth_components(params, stats)
    except VacuumStateError:
        row["status"] = "vacuum"
        return row
    row.update(
        D_main=breakdown.total,
        D_thermal=breakdown.thermal,
        D_cos=breakdown.cosine,
        D_sin=breakdown.sine,
        D_scully=linewidth_scully(params, stats),
        D_mcgowan=linewidth_mcgowan(params, stats),
    )
    gen = build_sideband_generator(params, stats.N)
    row["D_slope"] = linewidth_from_slope(gen, initial_sideband(stats))
    ratio, reference = schawlow_townes_ratio(params, stats, breakdown.total)
    row["st_ratio"] = ratio
    row["st_ref"] = reference
    return row


def cmd_scan_theta(cfg: dict) -> None:
    if cfg["dist"] != "fixed":
        raise ConfigError("scan-theta scans g*tau and needs dist='fixed'")
    thetas = _scan_range(cfg, 0.1, 4.0)  # in units of pi
    tasks = [(cfg, t) for t in thetas]
    rows = _map_ordered(_scan_theta_row, tasks, int(cfg["jobs"]))
    _emit(cfg, {"scan": "theta_over_pi"}, SCAN_THETA_COLUMNS, rows)


# -- fock-resolved ----------------------------------------------------------

FOCK_COLUMNS = [
    "g_tau", "theta", "n", "p_n", "w_main", "w_mcgowan",
    "w_main_norm", "w_mcgowan_norm", "status",
]


def cmd_fock_resolved(cfg: dict, g_taus: list[float]) -> None:
    if cfg["dist"] != "fixed":
        raise ConfigError("fock-resolved weights are defined per fixed tau")
    if not g_taus:
        raise ConfigError("at least one --g-tau is required")
    rows = []
    for g_tau in g_taus:
        params = _params_from_config(cfg, g_tau=g_tau)
        fw = fock_resolved_weights(params, cfg["trunc"])
        theta = params.theta(params.tau_dist.tau)
        main_peak = float(np.max(fw.main)) or 1.0
        mc_peak = float(np.max(np.abs(fw.mcgowan))) or 1.0
        for n in fw.n:
            rows.append({
                "g_tau": g_tau,
                "theta": theta,
                "n": int(n),
                "p_n": fw.p[n],
                "w_main": fw.main[n],
                "w_mcgowan": fw.mcgowan[n],
                "w_main_norm": fw.main[n] / main_peak,
                "w_mcgowan_norm": fw.mcgowan[n] / mc_peak,
                "status": "ok",
            })
    _emit(cfg, {"weight_normalization": "per-curve maximum"}, FOCK_COLUMNS, rows)


# -- spectrum ---------------------------------------------------------------

SPECTRUM_COLUMNS = ["section", "x", "value", "status"]


def cmd_spectrum(cfg: dict) -> None:
    params = _params_from_config(cfg)
    if isinstance(params.tau_dist, ExponentialTau) and params.n_th == 0.0:
        stats = steady_state_exp(params, cfg["trunc"])
    else:
        stats = steady_state(params, cfg["trunc"])
    nodes = cfg["nodes"]
    averages = TrigAverages.for_params(params, nodes) if nodes else None
    gen = build_sideband_generator(params, stats.N, averages)
    v0 = initial_sideband(stats)
    d_slope = linewidth_from_slope(gen, v0)
    decomp = spectral_decomposition(gen, v0)
    d_eigen = decomp.linewidth
    t_grid = np.linspace(0.0, 8.0 / d_slope, 257)
    g_t = correlate(gen, v0, t_grid)
    omega = np.linspace(-4.0 * d_eigen, 4.0 * d_eigen, 513)
    s_omega, fwhm = spectrum_and_fwhm(decomp, omega)
    rows = [{"section": "time", "x": t, "value": g, "status": "ok"} for t, g in zip(t_grid, g_t)]
    rows += [{"section": "frequency", "x": o, "value": s, "status": "ok"} for o, s in zip(omega, s_omega)]
    meta = {"D_slope": d_slope, "D_eigen": d_eigen, "FWHM": fwhm, "n_mean": stats.mean}
    _emit(cfg, meta, SPECTRUM_COLUMNS, rows)


# -- uniform-convergence ----------------------------------------------------


def _parse_orders(text: str) -> list[tuple[int, int]]:
    try:
        pairs = []
        for chunk in text.split(";"):
            a, b = chunk.split(",")
            pairs.append((int(a), int(b)))
        return pairs
    except ValueError as exc:
        raise ConfigError(f"cannot parse orders {text!r}; expected like '1,0;3,2;7,6'") from exc


def _uniform_row(task) -> dict:
    cfg, theta_bar, orders = task
    g_bar = float(cfg["g_tau"])
    rate = (theta_bar / g_bar) ** 2 * float(cfg["kappa"])
    base = dict(cfg, rate=rate)
    params = _params_from_config(base)
    row = {
        "theta_bar": theta_bar,
        "status": "ok" if theta_bar >= THRESHOLD_THETA_BAR else "below-threshold",
    }
    stats = steady_state_exp(params, cfg["trunc"])
    row["n_mean"] = stats.mean
    try:
        row["D_exact"] = linewidth_exp_closed(params, stats)
        row["D_exp_scully"] = linewidth_exp_scully(params, stats)
    except VacuumStateError:
        row["status"] = "vacuum"
        return row
    for order_pair in orders:
        uset = build_uniform_lindblad(params, order_pair, N=stats.N)
        row[f"D_order_{order_pair[0]}"] = uniform_linewidth(uset, uniform_steady_state(uset))
    return row


def cmd_uniform_convergence(cfg: dict) -> None:
    if cfg["dist"] != "exp":
        raise ConfigError("uniform-convergence needs dist='exp'")
    if cfg["g_tau"] is None:
        cfg = dict(cfg, g_tau=0.3)
    if cfg["nth"] not in (0, 0.0):
        raise ConfigError("the exponential closed forms hold at nth=0")
    orders = _parse_orders(cfg["orders"])
    theta_bars = _scan_range(cfg, 0.2, 3.0)
    columns = ["theta_bar", "n_mean", "D_exact", "D_exp_scully"]
    columns += [f"D_order_{o[0]}" for o in orders] + ["status"]
    tasks = [(cfg, tb, orders) for tb in theta_bars]
    rows = _map_ordered(_uniform_row, tasks, int(cfg["jobs"]))
    meta = {"threshold_theta_bar": THRESHOLD_THETA_BAR, "scan": "theta_bar via rate"}
    _emit(cfg, meta, columns, rows)


def _map_ordered(fn, tasks, jobs: int) -> list:
    """Rows computed (possibly in parallel) and returned in scan order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maserline",
        description="Micromaser photon statistics and linewidth scans.",
    )
    parser.add_argument("--version", action="version", version=f"maserline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--kappa", type=float, help="cavity decay rate (default 1)")
        p.add_argument("--nth", type=float, help="thermal occupation (default 0)")
        p.add_argument("--rate", type=float, help="atom injection rate (units of kappa)")
        p.add_argument("--dist", choices=("fixed", "exp"), help="interaction-time distribution")
        p.add_argument("--min", type=float, help="scan lower bound")
        p.add_argument("--max", type=float, help="scan upper bound")
        p.add_argument("--steps", type=int, help="number of scan points")
        p.add_argument("--trunc", type=int, help="Fock truncation override")
        p.add_argument("--nodes", type=int, help="quadrature node override")
        p.add_argument("--orders", help="uniform order pairs, e.g. '1,0;3,2;7,6'")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--jobs", type=int, help="parallel workers for scan rows (default 1)")

    p_scan = sub.add_parser("scan-theta", help="linewidth routes vs pump parameter (theta in units of pi)")
    add_common(p_scan)
    p_scan.add_argument("--g-tau", dest="g_tau", type=float, help="g*tau when rate=0")

    p_fock = sub.add_parser("fock-resolved", help="per-photon-number weights (one block per --g-tau)")
    add_common(p_fock)
    p_fock.add_argument("--g-tau", dest="g_tau", type=float, action="append",
                        help="g*tau; repeat for several curves")

    p_spec = sub.add_parser("spectrum", help="correlation function, spectrum and FWHM")
    add_common(p_spec)
    p_spec.add_argument("--g-tau", dest="g_tau", type=float, help="g*tau (fixed) or g*tau_bar (exp)")

    p_uni = sub.add_parser("uniform-convergence", help="uniform-approximation orders vs exact (scan theta_bar)")
    add_common(p_uni)
    p_uni.add_argument("--g-tau", dest="g_tau", type=float, help="g*tau_bar (default 0.3)")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fock-resolved":
            g_taus = args.g_tau or []
            args.g_tau = None
            cfg = _load_config(args)
            if not g_taus and cfg["g_tau"] is not None:
                g_taus = [float(cfg["g_tau"])]
            cmd_fock_resolved(cfg, g_taus)
        else:
            cfg = _load_config(args)
            if args.command == "scan-theta":
                cmd_scan_theta(cfg)
            elif args.command == "spectrum":
                cmd_spectrum(cfg)
            elif args.command == "uniform-convergence":
                cmd_uniform_convergence(cfg)
    except MaserlineError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": "ValueError", "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
