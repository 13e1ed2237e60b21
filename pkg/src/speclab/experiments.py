"""Reproducible experiment harness: configs, records, scans, and artifacts.

Each experiment is a deterministic function of an :class:`ExperimentConfig`.
Configs round-trip through a flat key-value text format (one section per
experiment), and every emitted record carries the sha256 hash of the
canonical config emission, so identical hashes imply bitwise-identical CSV
tables.  Wall-clock runtimes never enter the CSVs; they live only in the
JSON manifest written next to them.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .calibration import (
    ASSUMPTION1_BESOV_PER_N,
    C1_DELTA,
    C1_ETA,
    C1_GRAD_ARGMAX_R,
    C1_GRAD_ARGMAX_THETA,
    C1_GRAD_SUP,
    C1_J_BOUND,
    C1_N_REG,
    C_COMM,
    DUHAMEL_BENCH_AMPLITUDE,
    DUHAMEL_TOL_BENCH,
    EXP_GROWTH_DT,
    EXP_GROWTH_M,
    INFLATION_BESOV_BUDGET,
    INFLATION_CONTROL_TOL,
    INFLATION_DT,
    INFLATION_EPS,
    INFLATION_GRID_N,
    INFLATION_N,
    INFLATION_SUP_FACTOR,
    INFLATION_T,
    LINEAR_INFLATION_DT,
    LINEAR_INFLATION_KAPPA,
    LINEAR_INFLATION_T,
    LP_FLAT_SLOPE_BOUND,
    LP_GROWTH_C_HIGH,
    LP_GROWTH_C_LOW,
    LP_PROBE_DT,
    LP_PROBE_N_REG,
    LP_PROBE_T,
)
from .euler import EulerState, evolve_25d, evolve_euler, lp_growth_probe
from .grid import Field, Grid, VectorField
from .initial_data import cellular_flow, make_c1_datum, make_gn
from .interp import spectral_point_value
from .lp import BesovParams, besov_norm, build_filter_bank
from .multipliers import apply_multiplier, riesz_pair
from .norms import lip_seminorm, sup_norm
from .quadrature import diagonal_corner_oracle
from .transport import (
    commutator_scaling_scan,
    duhamel_residual,
    lower_bound_check,
    solve_forced_transport,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentError",
    "ExperimentRecord",
    "ExperimentResult",
    "config_hash",
    "default_config",
    "emit_config",
    "load_config",
    "max_band_cutoff",
    "parse_config",
    "run_experiment",
]

LP_P_LIST = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


class ExperimentError(RuntimeError):
    """A harness-level failure: bad config, infeasible range, or a task error."""


# --------------------------------------------------------------- configs


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, hashable description of one experiment run.

    ``n_lo``/``n_hi`` bound the band-cutoff range for the scans that use one
    (``n_lo > n_hi`` means an empty range); ``delta``/``eta``/``eps``/
    ``t_final``/``dt`` are the scalar dials of the underlying generators and
    solvers.  ``out_dir`` is excluded from the config hash so that moving the
    artifact directory cannot change the emitted tables.
    """

    experiment: str
    resolution: int
    period: float
    n_lo: int
    n_hi: int
    delta: float
    eta: float
    eps: float
    t_final: float
    dt: float
    out_dir: str
    seed: int


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}

DEFAULTS: dict[str, ExperimentConfig] = {
    "assumption1-scan": ExperimentConfig(
        experiment="assumption1-scan",
        resolution=2048,
        period=16.0 * math.pi,
        n_lo=2,
        n_hi=8,
        delta=0.0,
        eta=0.0,
        eps=0.05,
        t_final=0.0,
        dt=1.0,
        out_dir="speclab_out",
        seed=0,
    ),
    "linear-inflation": ExperimentConfig(
        experiment="linear-inflation",
        resolution=1024,
        period=2.0 * math.pi,
        n_lo=2,
        n_hi=7,
        delta=0.0,
        eta=0.0,
        eps=0.1,
        t_final=LINEAR_INFLATION_T,
        dt=LINEAR_INFLATION_DT,
        out_dir="speclab_out",
        seed=0,
    ),
    "euler-inflation": ExperimentConfig(
        experiment="euler-inflation",
        resolution=INFLATION_GRID_N,
        period=2.0 * math.pi,
        n_lo=2,
        n_hi=INFLATION_N,
        delta=0.0,
        eta=0.0,
        eps=INFLATION_EPS,
        t_final=INFLATION_T,
        dt=INFLATION_DT,
        out_dir="speclab_out",
        seed=0,
    ),
    "exp-growth": ExperimentConfig(
        experiment="exp-growth",
        resolution=256,
        period=2.0 * math.pi,
        n_lo=0,
        n_hi=0,
        delta=0.0,
        eta=0.0,
        eps=1.0,
        t_final=2.0,
        dt=EXP_GROWTH_DT,
        out_dir="speclab_out",
        seed=0,
    ),
    "c1-inflation": ExperimentConfig(
        experiment="c1-inflation",
        resolution=256,
        period=16.0,
        n_lo=0,
        n_hi=0,
        delta=C1_DELTA,
        eta=C1_ETA,
        eps=1.0,
        t_final=LP_PROBE_T,
        dt=LP_PROBE_DT,
        out_dir="speclab_out",
        seed=0,
    ),
    "commutator-scan": ExperimentConfig(
        experiment="commutator-scan",
        resolution=512,
        period=2.0 * math.pi,
        n_lo=0,
        n_hi=0,
        delta=0.0,
        eta=0.0,
        eps=0.1,
        t_final=0.0,
        dt=1.0,
        out_dir="speclab_out",
        seed=0,
    ),
    "calibrate": ExperimentConfig(
        experiment="calibrate",
        resolution=256,
        period=2.0 * math.pi,
        n_lo=0,
        n_hi=0,
        delta=C1_DELTA,
        eta=C1_ETA,
        eps=0.05,
        t_final=0.25,
        dt=2.5e-3,
        out_dir="speclab_out",
        seed=0,
    ),
}


def default_config(experiment: str) -> ExperimentConfig:
    if experiment not in DEFAULTS:
        known = ", ".join(sorted(DEFAULTS))
        raise ExperimentError(f"unknown experiment {experiment!r}; known: {known}")
    return DEFAULTS[experiment]


def _format_value(value) -> str:
    if isinstance(value, bool):
        raise TypeError("config fields are never boolean")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg: ExperimentConfig) -> str:
    """Canonical flat key-value emission (one section, declaration order)."""
    lines = [f"[{cfg.experiment}]"]
    for f in fields(cfg):
        if f.name == "experiment":
            continue
        lines.append(f"{f.name} = {_format_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> dict[str, dict[str, str]]:
    """Parse flat key-value text into {section: {key: raw value}}."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ExperimentError(f"malformed config: {exc}") from exc
    return {name: dict(parser[name]) for name in parser.sections()}


def _coerce(experiment: str, key: str, raw: str):
    kind = _FIELD_TYPES.get(key)
    if kind is None or key == "experiment":
        raise ExperimentError(f"unknown config key {key!r} in [{experiment}]")
    try:
        if kind in ("int", int):
            return int(raw)
        if kind in ("float", float):
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ExperimentError(f"bad value for {key!r} in [{experiment}]: {raw!r}") from exc


def validate_config(cfg: ExperimentConfig) -> None:
    n = cfg.resolution
    if n < 8 or (n & (n - 1)) != 0:
        raise ExperimentError(f"resolution must be a power of two >= 8, got {n}")
    if not (cfg.period > 0.0) or not math.isfinite(cfg.period):
        raise ExperimentError(f"period must be positive, got {cfg.period}")
    if not (cfg.dt > 0.0):
        raise ExperimentError(f"dt must be positive, got {cfg.dt}")
    if cfg.t_final < 0.0:
        raise ExperimentError(f"t_final must be nonnegative, got {cfg.t_final}")
    if cfg.eps <= 0.0:
        raise ExperimentError(f"eps must be positive, got {cfg.eps}")
    if cfg.delta < 0.0 or cfg.eta < 0.0:
        raise ExperimentError("delta and eta must be nonnegative")
    if cfg.n_lo < 0:
        raise ExperimentError(f"n_lo must be nonnegative, got {cfg.n_lo}")
    if cfg.seed < 0:
        raise ExperimentError(f"seed must be nonnegative, got {cfg.seed}")


def load_config(
    experiment: str,
    *,
    text: str | None = None,
    path: str | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Defaults, overlaid by the matching config-file section, then by flags."""
    cfg = default_config(experiment)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ExperimentError(f"cannot read config {path!r}: {exc}") from exc
    if text is not None:
        sections = parse_config(text)
        section = sections.get(experiment, {})
        updates = {k: _coerce(experiment, k, v) for k, v in section.items()}
        cfg = replace(cfg, **updates)
    if overrides:
        clean = {k: v for k, v in overrides.items() if v is not None}
        for key in clean:
            if key not in _FIELD_TYPES or key == "experiment":
                raise ExperimentError(f"unknown config override {key!r}")
        cfg = replace(cfg, **clean)
    validate_config(cfg)
    return cfg


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical emission, with the artifact directory blanked."""
    canonical = emit_config(replace(cfg, out_dir=""))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


# --------------------------------------------------------------- records


@dataclass(frozen=True)
class ExperimentRecord:
    """One measured row: parameter tuple, observables, fits, and a verdict."""

    params: tuple[tuple[str, object], ...]
    values: dict[str, float]
    fits: dict[str, float]
    passed: bool
    note: str
    runtime_s: float
    config_hash: str

    def param_key(self) -> str:
        return ",".join(f"{k}={_csv_cell(v)}" for k, v in self.params)


@dataclass(frozen=True)
class ExperimentResult:
    experiment: str
    config: ExperimentConfig
    config_hash: str
    records: list[ExperimentRecord]
    checks: dict[str, bool]
    warnings: list[str]
    artifacts: list[str]
    wall_s: float

    @property
    def failed(self) -> bool:
        return any(not r.passed for r in self.records) or not all(
            self.checks.values()
        )


def _warn(warnings: list[str], message: str) -> None:
    warnings.append(message)
    print(f"warning: {message}", file=sys.stderr)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "PASS" if value else "FAIL"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _records_csv(path: str, records: list[ExperimentRecord]) -> None:
    if not records:
        _write_csv(path, ["status", "note", "config_hash"], [])
        return
    param_names = [k for k, _ in records[0].params]
    for rec in records:
        if [k for k, _ in rec.params] != param_names:
            raise ExperimentError("records disagree on the parameter schema")
    value_keys = sorted({k for r in records for k in r.values})
    fit_keys = sorted({k for r in records for k in r.fits})
    header = param_names + value_keys + fit_keys + ["status", "note", "config_hash"]
    rows = []
    for rec in records:
        row = [v for _, v in rec.params]
        row += [rec.values.get(k) for k in value_keys]
        row += [rec.fits.get(k) for k in fit_keys]
        row += [rec.passed, rec.note, rec.config_hash]
        rows.append(row)
    _write_csv(path, header, rows)


# ------------------------------------------------------------------ SVG

_SVG_COLORS = ("#1f6fb2", "#c24f1f", "#2e8540", "#7a4db2", "#8a6d1f", "#555555")


def _svg_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + i * (hi - lo) / (count - 1) for i in range(count)]


def _write_svg(
    path: str,
    *,
    title: str,
    xlabel: str,
    ylabel: str,
    series: list[tuple[str, list[float], list[float]]],
) -> None:
    """Self-contained line plot; plain text, no external references."""
    width, height = 640.0, 420.0
    left, right, top, bottom = 66.0, 18.0, 40.0, 50.0
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi - x_lo < 1e-300:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi - y_lo < 1e-300:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_pad, y_pad = 0.04 * (x_hi - x_lo), 0.06 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right)

    def py(y: float) -> float:
        return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom)

    out = io.StringIO()
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:g} {height:g}" '
        f'font-family="sans-serif" font-size="12">\n'
    )
    out.write(f'<rect width="{width:g}" height="{height:g}" fill="white"/>\n')
    out.write(
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
        f"{title}</text>\n"
    )
    axis = (
        f'<line x1="{left:.1f}" y1="{height - bottom:.1f}" x2="{width - right:.1f}" '
        f'y2="{height - bottom:.1f}" stroke="black"/>\n'
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" '
        f'y2="{height - bottom:.1f}" stroke="black"/>\n'
    )
    out.write(axis)
    for t in _svg_ticks(x_lo, x_hi):
        out.write(
            f'<line x1="{px(t):.1f}" y1="{height - bottom:.1f}" x2="{px(t):.1f}" '
            f'y2="{height - bottom + 4:.1f}" stroke="black"/>\n'
            f'<text x="{px(t):.1f}" y="{height - bottom + 17:.1f}" '
            f'text-anchor="middle">{format(t, ".4g")}</text>\n'
        )
    for t in _svg_ticks(y_lo, y_hi):
        out.write(
            f'<line x1="{left - 4:.1f}" y1="{py(t):.1f}" x2="{left:.1f}" '
            f'y2="{py(t):.1f}" stroke="black"/>\n'
            f'<text x="{left - 7:.1f}" y="{py(t) + 4:.1f}" '
            f'text-anchor="end">{format(t, ".4g")}</text>\n'
        )
    out.write(
        f'<text x="{(left + width - right) / 2:.1f}" y="{height - 12:.1f}" '
        f'text-anchor="middle">{xlabel}</text>\n'
        f'<text x="16" y="{(top + height - bottom) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(top + height - bottom) / 2:.1f})">{ylabel}</text>\n'
    )
    for idx, (label, xs, ys) in enumerate(series):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        if len(xs) > 1:
            out.write(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>\n'
            )
        for x, y in zip(xs, ys):
            out.write(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>\n')
        out.write(
            f'<text x="{width - right - 6:.1f}" y="{top + 14 * idx + 4:.1f}" '
            f'text-anchor="end" fill="{color}">{label}</text>\n'
        )
    out.write("</svg>\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(out.getvalue())


# ------------------------------------------------------------- utilities


def _affine_fit(xs, ys) -> dict[str, float]:
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    if xs.size < 2:
        return {"slope": 0.0, "intercept": float(ys[0]) if ys.size else 0.0, "rsq": 1.0}
    A = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = slope * xs + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    rsq = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return {"slope": float(slope), "intercept": float(intercept), "rsq": float(rsq)}


def max_band_cutoff(grid: Grid, orientation: str = "diagonal", *, dealias: bool = False) -> int:
    """Deepest cutoff whose datum spectrum the grid can carry.

    With ``dealias=True`` the bound is the 2/3-rule band (what the advective
    solvers require of their data) instead of the representability bound.
    """
    limit = grid.dealias_xi if dealias else grid.nyquist_xi
    extent = math.sqrt(2.0) if orientation == "diagonal" else 1.0
    n = 0
    while extent * 2.0 ** (n + 1) <= limit * (1.0 + 1e-12):
        n += 1
    if n == 0:
        raise ExperimentError(
            f"grid (n={grid.n}, length={grid.length:g}) cannot carry any datum band"
        )
    return n


def _pool_map(task, keys: list, *, workers: int | None = None) -> list:
    """Run ``task`` over ``keys`` on a thread pool; results in ``keys`` order."""
    if not keys:
        return []
    if workers is None:
        workers = min(4, os.cpu_count() or 1, len(keys))
    results: dict[int, object] = {}
    if workers <= 1:
        for i, key in enumerate(keys):
            results[i] = task(key)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(task, key): i for i, key in enumerate(keys)}
            for fut, i in futures.items():
                try:
                    results[i] = fut.result()
                except ExperimentError:
                    raise
                except Exception as exc:
                    raise ExperimentError(f"task {keys[i]!r} failed: {exc}") from exc
    return [results[i] for i in range(len(keys))]


def _smooth_probe_field(grid: Grid, rng: np.random.Generator) -> Field:
    """Random real field with a Gaussian spectral envelope, sup-normalized."""
    xi_peak = 0.25 * grid.dealias_xi
    w = rng.standard_normal(grid.shape)
    c = np.fft.fftn(w) / w.size
    c = c * np.exp(-(grid.xi_sq / xi_peak**2)) * grid.dealias_mask
    c[(0,) * grid.dim] = 0.0
    f = Field.from_coeffs(grid, c)
    scale = float(np.abs(f.values).max())
    return f * (1.0 / scale) if scale > 0 else f


def _mean_dropped_gn(cutoff: int, grid: Grid):
    """Band datum with the constant mode removed (the solvers need mean zero)."""
    datum = make_gn(cutoff, grid)
    coeffs = datum.field.coeffs.copy()
    coeffs[(0,) * grid.dim] = 0.0
    return datum, Field.from_coeffs(grid, coeffs)


# ----------------------------------------------------- assumption-1 scan


def _run_assumption1(cfg: ExperimentConfig, out: str, quiet: bool):
    grid = Grid(n=cfg.resolution, length=cfg.period)
    chash = config_hash(cfg)
    warnings: list[str] = []
    requested = list(range(cfg.n_lo, cfg.n_hi + 1))
    if not requested:
        _records_csv(os.path.join(out, "assumption1-scan.csv"), [])
        return [], {}, warnings, ["assumption1-scan.csv"]
    n_max = max_band_cutoff(grid, "diagonal", dealias=False)
    ns = [n for n in requested if n <= n_max]
    if not ns:
        raise ExperimentError(
            f"no representable cutoff in [{cfg.n_lo}, {cfg.n_hi}]: the grid's "
            f"band tops out at N = {n_max}"
        )
    if len(ns) < len(requested):
        _warn(
            warnings,
            f"assumption1-scan: clamped N-range to {ns[0]}..{ns[-1]} "
            f"(diagonal spectrum extent sqrt(2)*2^N exceeds the grid Nyquist "
            f"{grid.nyquist_xi:g} beyond N = {n_max})",
        )
    bank = build_filter_bank(grid)
    operator = riesz_pair(2, 2)
    params = BesovParams(0.5, 4.0, 1.0)

    def task(n: int) -> ExperimentRecord:
        t0 = time.perf_counter()
        datum = make_gn(n, grid)
        image = apply_multiplier(operator, datum.field)
        corner = spectral_point_value(image, datum.corner)
        oracle = diagonal_corner_oracle(n)
        rel = abs(corner - oracle) / abs(oracle)
        sup_g = sup_norm(datum.field)
        besov = besov_norm(bank, datum.field, params)
        values = {
            "sup_gn": sup_g,
            "corner_value": corner,
            "corner_abs": abs(corner),
            "oracle": oracle,
            "oracle_rel_err": rel,
            "besov": besov,
            "besov_per_n": besov / n,
        }
        passed = rel <= 0.05 and values["besov_per_n"] <= ASSUMPTION1_BESOV_PER_N
        note = "" if passed else f"oracle mismatch {rel:.3f} or Besov/N over budget"
        return ExperimentRecord(
            params=(("N", n),),
            values=values,
            fits={},
            passed=passed,
            note=note,
            runtime_s=time.perf_counter() - t0,
            config_hash=chash,
        )

    records = _pool_map(task, ns)
    corner_fit = _affine_fit(ns, [r.values["corner_abs"] for r in records])
    sups = [r.values["sup_gn"] for r in records]
    checks = {
        "corner_affine_rsq": corner_fit["rsq"] >= 0.99,
        "corner_slope_positive": corner_fit["slope"] > 0.0,
        "sup_varies_under_2x": max(sups) / min(sups) < 2.0,
        "besov_per_n_bounded": max(r.values["besov_per_n"] for r in records)
        <= ASSUMPTION1_BESOV_PER_N,
    }
    records = [
        replace(
            r,
            fits={
                "corner_slope": corner_fit["slope"],
                "corner_intercept": corner_fit["intercept"],
                "corner_rsq": corner_fit["rsq"],
            },
        )
        for r in records
    ]
    _records_csv(os.path.join(out, "assumption1-scan.csv"), records)
    fit_line = [
        corner_fit["slope"] * n + corner_fit["intercept"] for n in ns
    ]
    _write_svg(
        os.path.join(out, "corner_growth.svg"),
        title="Corner value of the singular image vs band depth",
        xlabel="band cutoff N",
        ylabel="|R22 g_N(corner)|",
        series=[
            ("measured", [float(n) for n in ns], [r.values["corner_abs"] for r in records]),
            ("affine fit", [float(n) for n in ns], fit_line),
        ],
    )
    _write_svg(
        os.path.join(out, "besov_per_n.svg"),
        title="Besov(1/2,4,1) per unit band depth",
        xlabel="band cutoff N",
        ylabel="besov / N",
        series=[("measured", [float(n) for n in ns], [r.values["besov_per_n"] for r in records])],
    )
    return records, checks, warnings, [
        "assumption1-scan.csv",
        "corner_growth.svg",
        "besov_per_n.svg",
    ]


# ---------------------------------------------------- linear inflation


def _run_linear_inflation(cfg: ExperimentConfig, out: str, quiet: bool):
    grid = Grid(n=cfg.resolution, length=cfg.period)
    chash = config_hash(cfg)
    warnings: list[str] = []
    u = cellular_flow(grid, amplitude=1.0)
    lip = lip_seminorm(u)
    operator = riesz_pair(2, 2)
    n_max = min(cfg.n_hi, max_band_cutoff(grid, "diagonal", dealias=True))
    ladder = [cfg.eps, cfg.eps / 2.0, cfg.eps / 4.0]

    rungs = []
    for eps in ladder:
        n_raw = max(cfg.n_lo, int(round(LINEAR_INFLATION_KAPPA / eps**2)))
        n_used = min(n_raw, n_max)
        if n_used < n_raw:
            _warn(
                warnings,
                f"linear-inflation: eps={eps:g} asks for band rung N={n_raw}, "
                f"clamped to N={n_used} by the grid's dealias band",
            )
        rungs.append((eps, n_raw, n_used))

    def task(rung) -> ExperimentRecord:
        eps, n_raw, n_used = rung
        t0 = time.perf_counter()
        datum = make_gn(n_used, grid)
        f0 = datum.field * eps
        run = solve_forced_transport(
            f0, u, operator, T=cfg.t_final, dt=cfg.dt, save_every=None
        )
        final = run.fields[-1]
        corner_ratio = abs(spectral_point_value(final, datum.corner)) / eps
        bound = lower_bound_check(run)
        values = {
            "n_raw": float(n_raw),
            "n_used": float(n_used),
            "t": cfg.t_final,
            "sup_ratio_end": sup_norm(final) / eps,
            "sup_ratio_max": max(s for _, s in run.sup_trace) / eps,
            "corner_ratio": corner_ratio,
            "lower_bound_slack": bound["slack"],
            "lower_bound_ok": 1.0 if bound["ok"] else 0.0,
        }
        note = "" if n_used == n_raw else f"N clamped from {n_raw} to {n_used}"
        return ExperimentRecord(
            params=(("eps", eps), ("advect", "cellular")),
            values=values,
            fits={},
            passed=bool(bound["ok"]),
            note=note,
            runtime_s=time.perf_counter() - t0,
            config_hash=chash,
        )

    records = _pool_map(task, rungs)

    # forcing-only demo: with no advection the stepper is the exact
    # multiplier semigroup, so the solve must match it to round-off
    t0 = time.perf_counter()
    eps0, _, n_top = rungs[0]
    datum0 = make_gn(n_top, grid)
    f0 = datum0.field * eps0
    demo = solve_forced_transport(
        f0, None, operator, T=cfg.t_final, dt=cfg.t_final / 4.0
    )
    sym = operator.symbol_array(grid)
    exact = Field.from_coeffs(grid, f0.coeffs * np.exp(cfg.t_final * sym))
    semi_err = sup_norm(demo.fields[-1] + exact * -1.0)
    records.append(
        ExperimentRecord(
            params=(("eps", eps0), ("advect", "none")),
            values={
                "n_raw": float(n_top),
                "n_used": float(n_top),
                "t": cfg.t_final,
                "sup_ratio_end": sup_norm(demo.fields[-1]) / eps0,
                "sup_ratio_max": max(s for _, s in demo.sup_trace) / eps0,
                "corner_ratio": abs(spectral_point_value(demo.fields[-1], datum0.corner))
                / eps0,
                "semigroup_err": semi_err,
            },
            fits={},
            passed=semi_err <= 1e-8,
            note="" if semi_err <= 1e-8 else f"semigroup defect {semi_err:.2e}",
            runtime_s=time.perf_counter() - t0,
            config_hash=chash,
        )
    )

    ladder_records = records[: len(rungs)]
    corner = [r.values["corner_ratio"] for r in ladder_records]
    ns_used = [r.values["n_used"] for r in ladder_records]
    monotone = True
    strict_seen = False
    for (c0, n0), (c1, n1) in zip(zip(corner, ns_used), zip(corner[1:], ns_used[1:])):
        if c1 < c0 - 1e-12:
            monotone = False
        if n1 > n0:
            strict_seen = strict_seen or (c1 > c0)
            if c1 <= c0:
                monotone = False
    checks = {
        "corner_ratio_monotone": monotone,
        "lower_bound_all": all(r.values.get("lower_bound_ok", 1.0) == 1.0 for r in ladder_records),
    }
    if len(set(ns_used)) > 1:
        checks["corner_ratio_strict_on_distinct_rungs"] = strict_seen
    _records_csv(os.path.join(out, "linear-inflation.csv"), records)
    rung_idx = [float(i) for i in range(len(ladder_records))]
    _write_svg(
        os.path.join(out, "inflation_ladder.svg"),
        title="Forced-transport inflation across the eps ladder",
        xlabel="ladder rung (eps halves left to right)",
        ylabel="ratio to eps",
        series=[
            ("corner ratio", rung_idx, corner),
            ("sup ratio", rung_idx, [r.values["sup_ratio_max"] for r in ladder_records]),
        ],
    )
    return records, checks, warnings, ["linear-inflation.csv", "inflation_ladder.svg"]


# ----------------------------------------------------- euler inflation


def _run_euler_inflation(cfg: ExperimentConfig, out: str, quiet: bool):
    grid = Grid(n=cfg.resolution, length=cfg.period)
    chash = config_hash(cfg)
    warnings: list[str] = []
    n_max = max_band_cutoff(grid, "diagonal", dealias=True)
    n_used = min(cfg.n_hi, n_max)
    if n_used < cfg.n_hi:
        _warn(
            warnings,
            f"euler-inflation: band rung N={cfg.n_hi} clamped to N={n_used} "
            f"by the grid's dealias band",
        )
    datum, zeroed = _mean_dropped_gn(n_used, grid)
    w0 = zeroed * (cfg.eps / sup_norm(zeroed))
    state = EulerState.from_vorticity(w0)
    v0 = spectral_point_value(w0, datum.corner)
    bank = build_filter_bank(grid)
    besov0 = besov_norm(bank, w0, BesovParams(0.5, 4.0, 1.0))
    steps = max(1, int(round(cfg.t_final / cfg.dt)))
    save_every = max(1, steps // 16)

    def task(forced: bool):
        t0 = time.perf_counter()
        run = evolve_euler(
            state, T=cfg.t_final, dt=cfg.dt, forced=forced, save_every=save_every
        )
        return run, time.perf_counter() - t0

    (forced_run, forced_rt), (control_run, control_rt) = _pool_map(task, [True, False])

    def summarize(run, forced: bool, runtime: float) -> ExperimentRecord:
        sups = [row["omega_sup"] for row in run.trace]
        enstrophies = [row["enstrophy"] for row in run.trace]
        energies = [row["energy"] for row in run.trace]
        corner_gain = spectral_point_value(run.states[-1].omega, datum.corner) / v0
        ens_monotone = all(
            b <= a * (1.0 + 1e-10) for a, b in zip(enstrophies, enstrophies[1:])
        )
        values = {
            "n_used": float(n_used),
            "eps": cfg.eps,
            "sup_factor": max(sups) / cfg.eps,
            "corner_gain": corner_gain,
            "besov0": besov0,
            "enstrophy_monotone": 1.0 if ens_monotone else 0.0,
            "energy_drift": max(abs(e - energies[0]) / abs(energies[0]) for e in energies),
        }
        if forced:
            passed = (
                values["sup_factor"] >= INFLATION_SUP_FACTOR
                and ens_monotone
                and besov0 <= INFLATION_BESOV_BUDGET
            )
            note = (
                ""
                if passed
                else (
                    f"sup factor {values['sup_factor']:.4f} below the "
                    f"{INFLATION_SUP_FACTOR:g}x target at band rung {n_used}; "
                    f"corner gain {corner_gain:.2f} carries the mechanism"
                )
            )
        else:
            passed = values["sup_factor"] <= 1.0 + INFLATION_CONTROL_TOL and ens_monotone
            note = "" if passed else f"control sup factor {values['sup_factor']:.6f}"
        return ExperimentRecord(
            params=(("run", "forced" if forced else "control"),),
            values=values,
            fits={},
            passed=passed,
            note=note,
            runtime_s=runtime,
            config_hash=chash,
        )

    records = [
        summarize(forced_run, True, forced_rt),
        summarize(control_run, False, control_rt),
    ]
    checks = {
        "control_flat": records[1].passed,
        "enstrophy_monotone_forced": records[0].values["enstrophy_monotone"] == 1.0,
        "besov_budget": besov0 <= INFLATION_BESOV_BUDGET,
    }
    _records_csv(os.path.join(out, "euler-inflation.csv"), records)

    trace_keys = sorted(forced_run.trace[0].keys())
    trace_rows = []
    for name, run in (("forced", forced_run), ("control", control_run)):
        for row in run.trace:
            trace_rows.append([name] + [row[k] for k in trace_keys])
    _write_csv(os.path.join(out, "trace.csv"), ["run"] + trace_keys, trace_rows)

    snap_rows = []
    corner_series = []
    for name, run in (("forced", forced_run), ("control", control_run)):
        gains = [
            spectral_point_value(s.omega, datum.corner) / v0 for s in run.states
        ]
        if name == "forced":
            corner_series = gains
        snap_rows += [
            [name, t, g] for t, g in zip(run.times, gains)
        ]
    _write_csv(
        os.path.join(out, "snapshots.csv"), ["run", "t", "corner_gain"], snap_rows
    )

    t_axis = [row["t"] for row in forced_run.trace]
    _write_svg(
        os.path.join(out, "sup_history.svg"),
        title="Vorticity sup under damped forcing vs control",
        xlabel="t",
        ylabel="|omega|_sup / eps",
        series=[
            ("forced", t_axis, [row["omega_sup"] / cfg.eps for row in forced_run.trace]),
            (
                "control",
                [row["t"] for row in control_run.trace],
                [row["omega_sup"] / cfg.eps for row in control_run.trace],
            ),
        ],
    )
    _write_svg(
        os.path.join(out, "corner_gain.svg"),
        title="Corner-point amplification along the forced flow",
        xlabel="t",
        ylabel="corner value / initial",
        series=[("forced", list(forced_run.times), corner_series)],
    )
    return records, checks, warnings, [
        "euler-inflation.csv",
        "trace.csv",
        "snapshots.csv",
        "sup_history.svg",
        "corner_gain.svg",
    ]


# -------------------------------------------------------- 2.5-D growth


def _run_exp_growth(cfg: ExperimentConfig, out: str, quiet: bool):
    chash = config_hash(cfg)
    warnings: list[str] = []
    resolutions = [cfg.resolution, 2 * cfg.resolution]
    count = max(5, int(round(4.0 * cfg.t_final)) + 1)
    times = np.linspace(0.0, cfg.t_final, count)

    def task(res: int):
        t0 = time.perf_counter()
        grid = Grid(n=res, length=cfg.period)
        u_h = cellular_flow(grid)
        _, y = grid.mesh()
        u3 = Field.from_values(grid, np.sin(EXP_GROWTH_M * y))
        run = evolve_25d(u_h, u3, times=times, dt=cfg.dt)
        return run, time.perf_counter() - t0

    runs = _pool_map(task, resolutions)
    records = []
    curves = []
    for res, (run, runtime) in zip(resolutions, runs):
        grads = [rec.grad_sup for rec in run.records]
        fit = _affine_fit(times, np.log(grads))
        curves.append((res, list(times), [math.log10(g) for g in grads]))
        rows = {
            "grad_sup_final": grads[-1],
            "sup_max": max(rec.sup for rec in run.records),
        }
        passed = fit["rsq"] >= 0.98 and fit["slope"] > 0.0
        records.append(
            ExperimentRecord(
                params=(("resolution", res), ("scalar", "stripe")),
                values=rows,
                fits={"exponent": fit["slope"], "rsq": fit["rsq"]},
                passed=passed,
                note="" if passed else f"fit rsq {fit['rsq']:.4f}",
                runtime_s=runtime,
                config_hash=chash,
            )
        )

    # constant scalar: the characteristics move it nowhere, growth must vanish
    t0 = time.perf_counter()
    grid = Grid(n=cfg.resolution, length=cfg.period)
    u_h = cellular_flow(grid)
    x, _ = grid.mesh()
    const_run = evolve_25d(
        u_h, Field.from_values(grid, 0.3 + 0.0 * x), times=(0.0, cfg.t_final / 2.0, cfg.t_final)
    )
    flat = all(rec.grad_sup <= 1e-10 for rec in const_run.records)
    records.append(
        ExperimentRecord(
            params=(("resolution", cfg.resolution), ("scalar", "constant")),
            values={
                "grad_sup_final": const_run.records[-1].grad_sup,
                "sup_max": max(rec.sup for rec in const_run.records),
            },
            fits={"exponent": 0.0, "rsq": 1.0},
            passed=flat,
            note="" if flat else "constant scalar grew a gradient",
            runtime_s=time.perf_counter() - t0,
            config_hash=chash,
        )
    )

    exps = [r.fits["exponent"] for r in records[:2]]
    checks = {"exponent_improves_with_resolution": exps[1] > exps[0]}
    _records_csv(os.path.join(out, "exp-growth.csv"), records)

    growth_rows = []
    for res, (run, _) in zip(resolutions, runs):
        for rec in run.records:
            growth_rows.append([res, rec.t, rec.grad_sup, rec.sup])
    _write_csv(
        os.path.join(out, "growth.csv"),
        ["resolution", "t", "grad_sup", "sup"],
        growth_rows,
    )
    _write_svg(
        os.path.join(out, "gradient_growth.svg"),
        title="Scalar-gradient growth under the cellular flow",
        xlabel="t",
        ylabel="log10 |grad u3|_sup",
        series=[(f"n={res}", xs, ys) for res, xs, ys in curves],
    )
    return records, checks, warnings, [
        "exp-growth.csv",
        "growth.csv",
        "gradient_growth.svg",
    ]


# -------------------------------------------------------- C1 inflation


def _run_c1_inflation(cfg: ExperimentConfig, out: str, quiet: bool):
    grid = Grid(n=cfg.resolution, length=cfg.period)
    chash = config_hash(cfg)
    warnings: list[str] = []

    t0 = time.perf_counter()
    datum = make_c1_datum(grid, delta=cfg.delta, eta=cfg.eta, n_reg=LP_PROBE_N_REG)
    probe = lp_growth_probe(datum, T=cfg.t_final, p_list=LP_P_LIST, dt=cfg.dt)
    spiked_rt = time.perf_counter() - t0

    t0 = time.perf_counter()
    flat_datum = make_c1_datum(grid, delta=0.0, eta=cfg.eta, n_reg=LP_PROBE_N_REG)
    flat_probe = lp_growth_probe(flat_datum, T=0.0, p_list=LP_P_LIST)
    flat_rt = time.perf_counter() - t0

    fit = probe["profile_fit"]
    flat_fit = _affine_fit(
        list(LP_P_LIST), [flat_probe["lattice_curve"][p] for p in LP_P_LIST]
    )
    shells = probe["radial_shells"]
    shell_fit = _affine_fit(
        [math.log(1.0 / r) for r, _ in shells], [v for _, v in shells]
    )
    envelope_ok = True
    base = probe["growth"][0]["grad_lp"]
    for row in probe["growth"][1:]:
        for p in LP_P_LIST:
            gain = row["grad_lp"][p] - base[p]
            floor = LP_GROWTH_C_LOW * p * row["t"] - LP_GROWTH_C_HIGH * p * row["t"] ** 2
            envelope_ok = envelope_ok and gain >= floor

    records = []
    per_rt = spiked_rt / len(LP_P_LIST)
    for p in LP_P_LIST:
        records.append(
            ExperimentRecord(
                params=(("p", p), ("datum", "spiked")),
                values={
                    "lattice_lp": probe["lattice_curve"][p],
                    "profile_lp": probe["profile_curve"][p],
                    "fit_line": fit["slope"] * p + fit["intercept"],
                },
                fits={
                    "profile_slope": fit["slope"],
                    "profile_intercept": fit["intercept"],
                    "profile_rsq": fit["rsq"],
                    "anchor_rel_err": probe["anchor_rel_error"],
                    "quadrature_rel_err": probe["profile_quadrature_rel_error"],
                },
                passed=True,
                note="",
                runtime_s=per_rt,
                config_hash=chash,
            )
        )
    per_rt = flat_rt / len(LP_P_LIST)
    for p in LP_P_LIST:
        records.append(
            ExperimentRecord(
                params=(("p", p), ("datum", "flat")),
                values={
                    "lattice_lp": flat_probe["lattice_curve"][p],
                    "profile_lp": flat_probe["profile_curve"][p],
                    "fit_line": flat_fit["slope"] * p + flat_fit["intercept"],
                },
                fits={"profile_slope": flat_fit["slope"], "profile_rsq": flat_fit["rsq"]},
                passed=True,
                note="",
                runtime_s=per_rt,
                config_hash=chash,
            )
        )

    checks = {
        "anchor_at_p2": probe["anchor_rel_error"] <= 1e-10,
        "profile_slope_positive": fit["slope"] > 0.0,
        "profile_affine_rsq": fit["rsq"] >= 0.95,
        "quadrature_converged": probe["profile_quadrature_rel_error"] <= 1e-6,
        "shells_grow_inward": shell_fit["slope"] > 0.0,
        "growth_envelope": envelope_ok,
        "flat_without_spike": abs(flat_fit["slope"]) <= LP_FLAT_SLOPE_BOUND,
    }

    _records_csv(os.path.join(out, "c1-inflation.csv"), records)
    growth_rows = []
    for row in probe["growth"]:
        for p in LP_P_LIST:
            growth_rows.append([row["t"], p, row["grad_lp"][p]])
    _write_csv(
        os.path.join(out, "growth.csv"), ["t", "p", "grad_lp"], growth_rows
    )
    _write_csv(
        os.path.join(out, "shells.csv"),
        ["radius", "mean_abs_d22"],
        [[r, v] for r, v in shells],
    )
    ps = [float(p) for p in LP_P_LIST]
    _write_svg(
        os.path.join(out, "hessian_lp.svg"),
        title="Pressure-Hessian L^p curve and its affine profile",
        xlabel="p",
        ylabel="norm",
        series=[
            ("lattice", ps, [probe["lattice_curve"][p] for p in LP_P_LIST]),
            ("profile quadrature", ps, [probe["profile_curve"][p] for p in LP_P_LIST]),
            ("affine fit", ps, [fit["slope"] * p + fit["intercept"] for p in LP_P_LIST]),
        ],
    )
    return records, checks, warnings, [
        "c1-inflation.csv",
        "growth.csv",
        "shells.csv",
        "hessian_lp.svg",
    ]


# ------------------------------------------------------ commutator scan


def _run_commutator_scan(cfg: ExperimentConfig, out: str, quiet: bool):
    grid = Grid(n=cfg.resolution, length=cfg.period)
    chash = config_hash(cfg)
    warnings: list[str] = []
    top = cfg.eps
    if top > 0.2:
        _warn(
            warnings,
            f"commutator-scan: ladder top M={top:g} is outside the small-map "
            f"regime, clamped to 0.2",
        )
        top = 0.2
    targets = [top / 8.0, top / 4.0, top / 2.0, top]
    rng = np.random.default_rng(cfg.seed)
    u = cellular_flow(grid)
    suite = [_smooth_probe_field(grid, rng) for _ in range(2)]

    t0 = time.perf_counter()
    raw = commutator_scaling_scan(u, targets, suite)
    runtime = (time.perf_counter() - t0) / len(raw)

    per_m = [r["ratio"] / r["m"] for r in raw]
    median = float(np.median(per_m))
    records = []
    for rec, val in zip(raw, per_m):
        in_band = median / 3.0 <= val <= 3.0 * median
        values = {
            "m_achieved": rec["m"],
            "ratio": rec["ratio"],
            "ratio_per_m": val,
        }
        for p, lp_val in sorted(rec["lp_ratio_over_pm"].items()):
            values[f"lp_ratio_over_pm_p{int(p)}"] = lp_val
        records.append(
            ExperimentRecord(
                params=(("m_target", rec["target"]),),
                values=values,
                fits={"median_ratio_per_m": median},
                passed=in_band,
                note="" if in_band else f"ratio/M {val:.3f} outside 3x of median",
                runtime_s=runtime,
                config_hash=chash,
            )
        )
    checks = {"ratio_shrinks_with_m": raw[0]["ratio"] < raw[-1]["ratio"]}
    _records_csv(os.path.join(out, "commutator-scan.csv"), records)
    _write_svg(
        os.path.join(out, "commutator_law.svg"),
        title="Commutator norm ratio across flow-map sizes",
        xlabel="M",
        ylabel="ratio",
        series=[
            ("measured", [r["m"] for r in raw], [r["ratio"] for r in raw]),
            ("median law", [r["m"] for r in raw], [median * r["m"] for r in raw]),
        ],
    )
    return records, checks, warnings, ["commutator-scan.csv", "commutator_law.svg"]


# ----------------------------------------------------------- calibrate


def _run_calibrate(cfg: ExperimentConfig, out: str, quiet: bool):
    """Re-measure the cheap frozen constants and write a comparison snapshot.

    The sweep never mutates the source tree: it writes a report CSV and a
    snapshot next to the other artifacts for diffing against the shipped
    constants.
    """
    chash = config_hash(cfg)
    warnings: list[str] = []
    rows = []

    def add(name: str, measured: float, frozen: float, ok: bool, runtime: float):
        rows.append(
            ExperimentRecord(
                params=(("constant", name),),
                values={"measured": measured, "frozen": frozen},
                fits={},
                passed=ok,
                note="" if ok else f"measured {measured:.4g} vs frozen {frozen:.4g}",
                runtime_s=runtime,
                config_hash=chash,
            )
        )

    operator = riesz_pair(2, 2)

    # exact semigroup decay of a single vertical mode
    t0 = time.perf_counter()
    grid = Grid(n=128, length=2.0 * math.pi)
    _, y = grid.mesh()
    cosine = Field.from_values(grid, np.cos(y))
    run = solve_forced_transport(cosine, None, operator, T=1.0, dt=0.25)
    decay_err = abs(sup_norm(run.fields[-1]) - math.exp(-1.0)) / math.exp(-1.0)
    add("semigroup_decay_rel_err", decay_err, 1e-8, decay_err <= 1e-8, time.perf_counter() - t0)

    # along-the-flow representation residual at the bench settings
    t0 = time.perf_counter()
    bench_grid = Grid(n=cfg.resolution, length=2.0 * math.pi)
    rng = np.random.default_rng(cfg.seed)
    f0 = _smooth_probe_field(bench_grid, rng)
    u_bench = cellular_flow(bench_grid, amplitude=DUHAMEL_BENCH_AMPLITUDE)
    bench = solve_forced_transport(
        f0, u_bench, operator, T=cfg.t_final, dt=cfg.dt, save_every=5
    )
    residual = duhamel_residual(bench)
    add(
        "duhamel_bench_residual",
        residual,
        DUHAMEL_TOL_BENCH,
        residual <= DUHAMEL_TOL_BENCH,
        time.perf_counter() - t0,
    )

    # commutator constant at a single mid-regime map size
    t0 = time.perf_counter()
    scan = commutator_scaling_scan(
        cellular_flow(bench_grid),
        (cfg.eps,),
        [_smooth_probe_field(bench_grid, rng) for _ in range(2)],
    )
    comm = scan[0]["ratio"] / scan[0]["m"]
    add("commutator_ratio_per_m", comm, C_COMM, comm <= C_COMM, time.perf_counter() - t0)

    # C1 datum: gradient budget at the calibrated argmax and the det residual
    t0 = time.perf_counter()
    c1_grid = Grid(n=cfg.resolution, length=16.0)
    c1 = make_c1_datum(c1_grid, delta=cfg.delta, eta=cfg.eta, n_reg=C1_N_REG)
    rs = np.geomspace(1e-5, 2.2, 160)
    th = np.linspace(0.0, 2.0 * math.pi, 49)[:-1]
    rr, tt = np.meshgrid(rs, th, indexing="ij")
    rp = np.linspace(C1_GRAD_ARGMAX_R - 0.12, C1_GRAD_ARGMAX_R + 0.12, 61)
    tp = np.linspace(C1_GRAD_ARGMAX_THETA - 0.09, C1_GRAD_ARGMAX_THETA + 0.09, 61)
    rrp, ttp = np.meshgrid(rp, tp, indexing="ij")
    r_all = np.concatenate([rr.ravel(), rrp.ravel()])
    t_all = np.concatenate([tt.ravel(), ttp.ravel()])
    jac = c1.grad_u_analytic(r_all * np.cos(t_all), r_all * np.sin(t_all))
    grad_sup = float(np.linalg.svd(jac, compute_uv=False)[..., 0].max())
    add(
        "c1_grad_sup",
        grad_sup,
        C1_GRAD_SUP,
        abs(grad_sup - C1_GRAD_SUP) <= 0.01 * C1_GRAD_SUP,
        time.perf_counter() - t0,
    )

    t0 = time.perf_counter()
    r = np.sqrt(rng.uniform(1e-8, 0.81, size=3000))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=3000)
    xs, ys = r * np.cos(theta), r * np.sin(theta)
    det = c1.det_grad_analytic(xs, ys)
    cross = c1.eta * c1.delta * c1.dxx_lap_g_analytic(xs, ys)
    j_sup = float(np.abs((det - cross) / c1.delta**2).max())
    add("c1_j_sup", j_sup, C1_J_BOUND, j_sup <= C1_J_BOUND, time.perf_counter() - t0)

    # gradient-growth exponent of the stripe scalar at a small grid
    t0 = time.perf_counter()
    small = Grid(n=128, length=2.0 * math.pi)
    _, y_s = small.mesh()
    run25 = evolve_25d(
        cellular_flow(small),
        Field.from_values(small, np.sin(EXP_GROWTH_M * y_s)),
        times=np.linspace(0.0, 1.0, 5),
        dt=EXP_GROWTH_DT,
    )
    fit = _affine_fit(
        [rec.t for rec in run25.records],
        np.log([rec.grad_sup for rec in run25.records]),
    )
    add(
        "exp_growth_exponent_small",
        fit["slope"],
        0.8,
        fit["slope"] >= 0.8,
        time.perf_counter() - t0,
    )

    checks: dict[str, bool] = {}
    _records_csv(os.path.join(out, "calibrate.csv"), rows)
    snapshot_lines = [
        "# measured calibration snapshot; compare against the shipped",
        "# constants before re-freezing anything.  Generated artifact --",
        "# never imported by the package.",
    ]
    for rec in rows:
        name = rec.params[0][1]
        snapshot_lines.append(
            f"{str(name).upper()} = {rec.values['measured']!r}  # frozen: {rec.values['frozen']!r}"
        )
    with open(os.path.join(out, "calibration_snapshot.py"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(snapshot_lines) + "\n")
    return rows, checks, warnings, ["calibrate.csv", "calibration_snapshot.py"]


# ---------------------------------------------------------------- runner

EXPERIMENTS = {
    "assumption1-scan": _run_assumption1,
    "linear-inflation": _run_linear_inflation,
    "euler-inflation": _run_euler_inflation,
    "exp-growth": _run_exp_growth,
    "c1-inflation": _run_c1_inflation,
    "commutator-scan": _run_commutator_scan,
    "calibrate": _run_calibrate,
}


def run_experiment(cfg: ExperimentConfig, *, quiet: bool = False) -> ExperimentResult:
    if cfg.experiment not in EXPERIMENTS:
        raise ExperimentError(f"unknown experiment {cfg.experiment!r}")
    validate_config(cfg)
    out = os.path.join(cfg.out_dir, cfg.experiment)
    os.makedirs(out, exist_ok=True)
    chash = config_hash(cfg)
    t0 = time.perf_counter()
    try:
        records, checks, warnings, artifacts = EXPERIMENTS[cfg.experiment](
            cfg, out, quiet
        )
    except ExperimentError:
        raise
    except Exception as exc:
        raise ExperimentError(f"{cfg.experiment} failed: {exc}") from exc
    wall = time.perf_counter() - t0

    manifest = {
        "experiment": cfg.experiment,
        "config_hash": chash,
        "config": {
            f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "experiment"
        },
        "records": len(records),
        "failures": sum(1 for r in records if not r.passed),
        "checks": {k: bool(v) for k, v in checks.items()},
        "warnings": warnings,
        "artifacts": artifacts,
        "wall_s": wall,
        "runtimes_s": {r.param_key(): r.runtime_s for r in records},
    }
    manifest_path = os.path.join(out, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    artifacts = artifacts + ["manifest.json"]

    result = ExperimentResult(
        experiment=cfg.experiment,
        config=cfg,
        config_hash=chash,
        records=records,
        checks=checks,
        warnings=warnings,
        artifacts=[os.path.join(out, a) for a in artifacts],
        wall_s=wall,
    )
    if not quiet:
        for rec in records:
            status = "PASS" if rec.passed else "FAIL"
            extra = f"  [{rec.note}]" if rec.note else ""
            print(f"[{cfg.experiment}] {rec.param_key()}: {status}{extra}")
        for name, ok in checks.items():
            print(f"[{cfg.experiment}] check {name}: {'PASS' if ok else 'FAIL'}")
        print(
            f"[{cfg.experiment}] {len(records)} records, "
            f"{sum(1 for r in records if not r.passed)} failed, "
            f"artifacts in {out}"
        )
    return result
