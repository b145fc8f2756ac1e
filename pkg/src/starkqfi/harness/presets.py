"""Pinned desk-scale reproduction presets, one per figure panel.

Each preset regenerates the data behind one reference panel (many-body
sizes capped at L = 14) and writes a figure-named CSV the plotting tool can
consume, plus fit rows where the panel reports exponents.
"""
from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from .. import __version__, scaling
from ..model import ProbeClass
from .. import experiments as ex
from . import csvio
from .config import ConfigError

SP, MB = ProbeClass.SINGLE_PARTICLE, ProbeClass.MANY_BODY

# pinned parameter windows (fixed here once, echoed into outputs)
EQ_A_LIST = (0.02, 0.03, 0.04, 0.05)
EQ_L_LIST = tuple(range(50, 301, 10))
MB_EQ_A_LIST = (0.05, 0.1)
MB_EQ_L_LIST = (8, 10, 12, 14)
DYN_A = 0.05
DYN_L_LIST = tuple(range(100, 301, 20))
MB_DYN_A = 0.02
MB_DYN_L_LIST = (6, 8, 10, 12, 14)

FIGURES = (
    "fig1a", "fig1b", "fig1c",
    "fig2a", "fig2b", "fig2c",
    "fig3a", "fig3b",
    "fig4a", "fig4b",
    "fig5a", "fig5b", "fig5c", "fig5d",
    "fig6a", "fig6b", "fig6c", "fig6d",
    "table1",
)


def _fit_rows(kind: str, groups: dict[float, list[tuple[float, float]]], fitter):
    rows, slopes = [], []
    for g in sorted(groups):
        pts = sorted(groups[g])
        fit = fitter([p[0] for p in pts], [p[1] for p in pts])
        slopes.append((g, fit.slope))
        rows.append(dict(group=f"{g:g}", kind=kind, slope=fit.slope,
                         intercept=fit.intercept, r2=fit.r_squared,
                         win_lo=fit.window[0], win_hi=fit.window[1], n=fit.n_points))
    if len(slopes) >= 3:
        meta = scaling.meta_fit_linear_in_a([s[0] for s in slopes],
                                            [s[1] for s in slopes])
        rows.append(dict(group="meta", kind=f"{kind}-meta", slope=meta.slope,
                         intercept=meta.intercept, r2=meta.r_squared,
                         win_lo=meta.window[0], win_hi=meta.window[1], n=meta.n_points))
    return rows

FITS_HEADER = ["group", "kind", "slope", "intercept", "r2", "win_lo", "win_hi", "n"]


def _eq_curve_panel(out, name, probe, selector, a, L_list, h_grid, workers):
    args = [(probe, L, a, float(h), selector) for L in L_list for h in h_grid]
    values = ex.parallel_map(ex.eq_qfi, args, workers)
    rows = [dict(a=a, L=arg[1], h=arg[3], qfi=v) for arg, v in zip(args, values)]
    return csvio.write_csv(out / f"{name}.csv", ["a", "L", "h", "qfi"], rows)


def _eq_scaling_panels(out, stem, selector, workers):
    """qfi(h->0), qfi(h_max) and h_max per (a, L); returns the three CSVs."""
    combos = [(a, L) for a in EQ_A_LIST for L in EQ_L_LIST]
    h0 = ex.parallel_map(ex.eq_qfi_h0,
                         [(SP, L, a, selector) for a, L in combos], workers)
    trans = ex.parallel_map(ex.eq_transition,
                            [(SP, L, a, selector) for a, L in combos], workers)
    scal_rows, hmax_rows = [], []
    for (a, L), q0, tr in zip(combos, h0, trans):
        scal_rows.append(dict(a=a, L=L, qfi_h0=q0, qfi_hmax=tr.qfi_peak))
        hmax_rows.append(dict(a=a, L=L, h_max=tr.h_max))
    scal_path = csvio.write_csv(out / f"{stem}b.csv",
                                ["a", "L", "qfi_h0", "qfi_hmax"], scal_rows)
    hmax_path = csvio.write_csv(out / f"{stem}c.csv", ["a", "L", "h_max"], hmax_rows)

    fits = []
    for column, kind in (("qfi_h0", f"{stem}-beta-h0"), ("qfi_hmax", f"{stem}-beta-hmax")):
        groups = {}
        for row in scal_rows:
            groups.setdefault(row["a"], []).append((row["L"], row[column]))
        fits += _fit_rows(kind, groups, scaling.fit_exponential_in_L)
    groups = {}
    for row in hmax_rows:
        groups.setdefault(row["a"], []).append((row["L"], row["h_max"]))
    fits += _fit_rows(f"{stem}-aprime", groups, scaling.fit_hmax_scaling)
    csvio.upsert_csv(out / "fits.csv", FITS_HEADER, fits, key="kind")
    return [scal_path, hmax_path]


def _gap_panel(out, name, probe, a_list, L_list, workers):
    args = [(probe, L, a) for a in a_list for L in L_list]
    gaps = ex.parallel_map(ex.gap_value, args, workers)
    rows = [dict(probe="sp" if probe is SP else "mb", L=arg[1], a=arg[2], gap=g)
            for arg, g in zip(args, gaps)]
    path = csvio.write_csv(out / f"{name}.csv", ["probe", "L", "a", "gap"], rows)
    groups = {}
    for row in rows:
        groups.setdefault(row["a"], []).append((row["L"], row["gap"]))
    csvio.upsert_csv(out / "fits.csv", FITS_HEADER,
                     _fit_rows(f"{name}-gap", groups, scaling.fit_power_law),
                     key="kind")
    return [path]


def _sp_dyn_series_panel(out, workers):
    times = np.arange(0.0, 1001.0)
    args = [(L, DYN_A, 0.0, times) for L in DYN_L_LIST]
    series = ex.parallel_map(ex.sp_dyn_series, args, workers)
    rows = [dict(a=DYN_A, L=arg[0], t=float(t), qfi=float(v))
            for arg, s in zip(args, series) for t, v in zip(s.times, s.values)]
    return csvio.write_csv(out / "fig5a.csv", ["a", "L", "t", "qfi"], rows)


def _sp_dyn_favg_panel(out, workers):
    h_grid = np.logspace(-7, 0, 43)
    args = [(L, DYN_A, float(h)) for L in DYN_L_LIST for h in h_grid]
    vals = ex.parallel_map(ex.sp_dyn_favg, args, workers)
    rows = [dict(a=DYN_A, L=arg[0], h=arg[2], qfi_avg=v) for arg, v in zip(args, vals)]
    return csvio.write_csv(out / "fig5b.csv", ["a", "L", "h", "qfi_avg"], rows)


def _sp_dyn_scaling_panels(out, workers):
    h0 = ex.parallel_map(ex.sp_dyn_favg, [(L, DYN_A, 0.0) for L in DYN_L_LIST], workers)
    rows = [dict(a=DYN_A, L=L, qfi_avg_h0=v) for L, v in zip(DYN_L_LIST, h0)]
    c_path = csvio.write_csv(out / "fig5c.csv", ["a", "L", "qfi_avg_h0"], rows)
    trans = ex.parallel_map(ex.sp_dyn_transition,
                            [(L, DYN_A) for L in DYN_L_LIST], workers)
    d_rows = [dict(a=DYN_A, L=L, h_max=t.h_max, qfi_avg_peak=t.qfi_peak)
              for L, t in zip(DYN_L_LIST, trans)]
    d_path = csvio.write_csv(out / "fig5d.csv", ["a", "L", "h_max", "qfi_avg_peak"], d_rows)
    fits = _fit_rows("fig5-beta-h0", {DYN_A: [(r["L"], r["qfi_avg_h0"]) for r in rows]},
                     scaling.fit_exponential_in_L)
    fits += _fit_rows("fig5-aprime", {DYN_A: [(r["L"], r["h_max"]) for r in d_rows]},
                      scaling.fit_hmax_scaling)
    csvio.upsert_csv(out / "fits.csv", FITS_HEADER, fits, key="kind")
    return [c_path, d_path]


def _mb_dyn_curve_panel(out, name, a_list, L_list, workers):
    rows = []
    for a in a_list:
        for L in L_list:
            args = [(L, a, float(h)) for h in ex.MB_DYN_GRID]
            vals = ex.parallel_map(ex.mb_dyn_fom, args, workers)
            rows += [dict(a=a, L=L, h=arg[2], qfi_over_t2=v)
                     for arg, v in zip(args, vals)]
    return csvio.write_csv(out / f"{name}.csv", ["a", "L", "h", "qfi_over_t2"], rows)


def _mb_dyn_scaling_panel(out, workers):
    rows = []
    for L in MB_DYN_L_LIST:
        h_peak, fom_peak = ex.mb_dyn_peak(L, MB_DYN_A)
        fom_h0 = ex.mb_dyn_fom(L, MB_DYN_A, 1e-8)
        rows.append(dict(a=MB_DYN_A, L=L, fom_h0=fom_h0, fom_peak=fom_peak,
                         h_peak=h_peak))
    path = csvio.write_csv(out / "fig6d.csv",
                           ["a", "L", "fom_h0", "fom_peak", "h_peak"], rows)
    fits = _fit_rows("fig6-beta-h0",
                     {MB_DYN_A: [(r["L"], r["fom_h0"]) for r in rows]},
                     scaling.fit_exponential_in_L)
    fits += _fit_rows("fig6-beta-hmax",
                      {MB_DYN_A: [(r["L"], r["fom_peak"]) for r in rows]},
                      scaling.fit_exponential_in_L)
    csvio.upsert_csv(out / "fits.csv", FITS_HEADER, fits, key="kind")
    return [path]


def _mb_eq_scaling_panel(out, workers):
    combos = [(a, L) for a in MB_EQ_A_LIST for L in MB_EQ_L_LIST]
    vals = ex.parallel_map(ex.eq_qfi_h0,
                           [(MB, L, a, "ground") for a, L in combos], workers)
    rows = [dict(a=a, L=L, qfi_h0=v) for (a, L), v in zip(combos, vals)]
    path = csvio.write_csv(out / "fig3b.csv", ["a", "L", "qfi_h0"], rows)
    groups = {}
    for row in rows:
        groups.setdefault(row["a"], []).append((row["L"], row["qfi_h0"]))
    csvio.upsert_csv(out / "fits.csv", FITS_HEADER,
                     _fit_rows("fig3-beta-h0", groups, scaling.fit_exponential_in_L),
                     key="kind")
    return [path]


def reproduce(figure: str, out_dir: str | Path, workers: int = 1) -> list[Path]:
    """Regenerate the data files behind one figure id (see FIGURES)."""
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    paths: list[Path]
    if figure == "fig1a":
        paths = [_eq_curve_panel(out, "fig1a", SP, "edge", 0.04,
                                 (100, 150, 200, 250, 300),
                                 np.logspace(-9, 1, 91), workers)]
    elif figure in ("fig1b", "fig1c"):
        paths = _eq_scaling_panels(out, "fig1", "edge", workers)
    elif figure == "fig2a":
        paths = [_eq_curve_panel(out, "fig2a", SP, "mid", 0.04,
                                 (100, 150, 200, 250, 300),
                                 np.logspace(-9, 1, 91), workers)]
    elif figure in ("fig2b", "fig2c"):
        paths = _eq_scaling_panels(out, "fig2", "mid", workers)
    elif figure == "fig3a":
        paths = [_eq_curve_panel(out, "fig3a", MB, "ground", 0.1, MB_EQ_L_LIST,
                                 np.logspace(-4, 1, 61), workers)]
    elif figure == "fig3b":
        paths = _mb_eq_scaling_panel(out, workers)
    elif figure == "fig4a":
        paths = _gap_panel(out, "fig4a", SP, EQ_A_LIST, EQ_L_LIST, workers)
    elif figure == "fig4b":
        paths = _gap_panel(out, "fig4b", MB, MB_EQ_A_LIST, MB_EQ_L_LIST, workers)
    elif figure == "fig5a":
        paths = [_sp_dyn_series_panel(out, workers)]
    elif figure == "fig5b":
        paths = [_sp_dyn_favg_panel(out, workers)]
    elif figure in ("fig5c", "fig5d"):
        paths = _sp_dyn_scaling_panels(out, workers)
    elif figure == "fig6a":
        h_peak, _ = ex.mb_dyn_peak(14, MB_DYN_A)
        times = np.arange(0.0, 101.0)
        rows = []
        for label, h in (("ergodic", 0.01), ("transition", h_peak), ("localized", 10.0)):
            series = ex.mb_dyn_series(14, MB_DYN_A, h, times)
            rows += [dict(a=MB_DYN_A, L=14, regime=label, h=h, t=float(t), qfi=float(v))
                     for t, v in zip(series.times, series.values)]
        paths = [csvio.write_csv(out / "fig6a.csv",
                                 ["a", "L", "regime", "h", "t", "qfi"], rows)]
    elif figure == "fig6b":
        paths = [_mb_dyn_curve_panel(out, "fig6b", (0.01, 0.02, 0.05), (14,), workers)]
    elif figure == "fig6c":
        paths = [_mb_dyn_curve_panel(out, "fig6c", (MB_DYN_A,), (6, 8, 12, 14), workers)]
    elif figure == "fig6d":
        paths = [_mb_dyn_scaling_panel(out, workers)]
    elif figure == "table1":
        paths = []
        paths += _eq_scaling_panels(out, "fig1", "edge", workers)
        paths += _eq_scaling_panels(out, "fig2", "mid", workers)
        paths += _mb_eq_scaling_panel(out, workers)
        paths += _sp_dyn_scaling_panels(out, workers)
        paths += _mb_dyn_scaling_panel(out, workers)
    manifest = {
        "tool": "starkqfi",
        "version": __version__,
        "figure": figure,
        "workers": workers,
        "wall_clock_s": round(time.time() - started, 3),
        "outputs": [str(p) for p in paths],
    }
    manifest_path = out / f"{figure}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return paths + [manifest_path]
