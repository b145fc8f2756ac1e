"""Sweep scheduler: independent grid points, ordered deterministic reduction.

Every task is a pure function of a small parameter dict, so tasks can run
inline (workers=1) or in a process pool; output ordering always follows the
input grid, and one failing point is recorded in the manifest instead of
aborting the sweep.
"""
from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..equilibrium import QfiMethod
from ..model import ProbeClass
from .. import experiments as ex
from .config import ConfigError, ExperimentConfig
from . import csvio

_METHODS = {"eigen-sum": QfiMethod.EIGEN_SUM, "fidelity-fd": QfiMethod.FIDELITY_FD}
_PROBES = {"sp": ProbeClass.SINGLE_PARTICLE, "mb": ProbeClass.MANY_BODY}

SCHEMAS = {
    "eq-sweep": ["probe", "L", "a", "h", "qfi", "method"],
    "dyn-agg": ["probe", "L", "a", "h", "fom", "fom_kind"],
    "dyn-series": ["probe", "L", "a", "h", "t", "qfi"],
    "transition-scan": ["probe", "L", "a", "selector", "h_max", "qfi_peak"],
    "dyn-transition-scan": ["probe", "L", "a", "h_max", "fom_peak"],
    "gap-scan": ["probe", "L", "a", "h", "gap"],
    "bound-check": ["L", "a", "bound_log", "qfi_log", "ok"],
    "fits": ["group", "kind", "slope", "intercept", "r2", "win_lo", "win_hi", "n"],
}


def _run_point(task: dict) -> dict:
    """Executed in a worker; never raises.

    BLAS pools are pinned to one thread: the per-point arithmetic is then
    the same whether the scheduler runs inline or across N processes, which
    is what makes output files byte-identical for any worker count.
    """
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=1):
        return _run_point_inner(task)


def _run_point_inner(task: dict) -> dict:
    try:
        kind = task["kind"]
        probe = _PROBES[task["probe"]]
        if kind == "eq-sweep":
            qfi = ex.eq_qfi(
                probe, task["L"], task["a"], task["h"], task["selector"],
                _METHODS[task["method"]],
            )
            rows = [dict(probe=task["probe"], L=task["L"], a=task["a"], h=task["h"],
                         qfi=qfi, method=task["method"])]
            return {"status": "ok", "rows": rows}
        if kind == "transition-scan":
            tr = ex.eq_transition(
                probe, task["L"], task["a"], task["selector"], _METHODS[task["method"]],
            )
            rows = [dict(probe=task["probe"], L=task["L"], a=task["a"],
                         selector=task["selector"], h_max=tr.h_max, qfi_peak=tr.qfi_peak)]
            return {"status": "ok", "rows": rows}
        if kind == "dyn-sweep":
            times = np.asarray(task["times"])
            if probe is ProbeClass.SINGLE_PARTICLE:
                series = ex.sp_dyn_series(task["L"], task["a"], task["h"], times)
                fom = ex.time_average(series, ex.SP_AVG_T_MIN, ex.SP_AVG_T_MAX, 1.0) \
                    if task["with_avg"] else float("nan")
                fom_kind = "qfi_avg"
            else:
                series = ex.mb_dyn_series(task["L"], task["a"], task["h"], times)
                t_lo, t_hi, _ = ex.MB_LATE_WINDOW
                sel = (series.times >= t_lo) & (series.times <= t_hi)
                fom = float(np.mean(series.values[sel] / series.times[sel] ** 2))
                fom_kind = "qfi_over_t2"
            agg = dict(probe=task["probe"], L=task["L"], a=task["a"], h=task["h"],
                       fom=fom, fom_kind=fom_kind)
            series_rows = [
                dict(probe=task["probe"], L=task["L"], a=task["a"], h=task["h"],
                     t=float(t), qfi=float(v))
                for t, v in zip(series.times, series.values)
            ]
            return {"status": "ok", "rows": [agg], "series_rows": series_rows}
        if kind == "dyn-transition-scan":
            tr = ex.sp_dyn_transition(task["L"], task["a"])
            rows = [dict(probe=task["probe"], L=task["L"], a=task["a"],
                         h_max=tr.h_max, fom_peak=tr.qfi_peak)]
            return {"status": "ok", "rows": rows}
        if kind == "gap-scan":
            gap = ex.gap_value(probe, task["L"], task["a"], task["h"])
            rows = [dict(probe=task["probe"], L=task["L"], a=task["a"], h=task["h"],
                         gap=gap)]
            return {"status": "ok", "rows": rows}
        if kind == "bound-check":
            res = ex.bound_check(task["a"], task["L"])
            rows = [dict(L=res.L, a=res.a, bound_log=res.bound_log,
                         qfi_log=res.qfi_log, ok=res.ok)]
            return {"status": "ok", "rows": rows}
        return {"status": "error", "reason": f"unknown task kind {kind!r}"}
    except Exception:
        return {"status": "error", "reason": traceback.format_exc(limit=3)}


def _build_tasks(config: ExperimentConfig) -> list[dict]:
    tasks: list[dict] = []
    base = dict(kind=config.kind, probe=config.probe, selector=config.selector,
                method=config.method)
    if config.kind in ("eq-sweep", "dyn-sweep"):
        grid = [float(h) for h in config.h_grid()]
        times = None
        if config.kind == "dyn-sweep":
            times = [float(t) for t in config.t_grid()]
        for a in config.a:
            for L in config.L:
                for h in grid:
                    task = dict(base, L=L, a=a, h=h)
                    if times is not None:
                        # the SP averaging window needs integer coverage
                        with_avg = config.t_scale == "integer" and \
                            config.t_min <= ex.SP_AVG_T_MIN and \
                            config.t_max >= ex.SP_AVG_T_MAX
                        task.update(times=times, with_avg=with_avg)
                    tasks.append(task)
    elif config.kind in ("transition-scan", "dyn-transition-scan"):
        for a in config.a:
            for L in config.L:
                tasks.append(dict(base, L=L, a=a))
    elif config.kind == "gap-scan":
        for a in config.a:
            for L in config.L:
                tasks.append(dict(base, L=L, a=a, h=config.gap_h))
    elif config.kind == "bound-check":
        for a in config.a:
            for L in config.L:
                tasks.append(dict(base, L=L, a=a))
    else:
        raise ConfigError(f"kind {config.kind!r} is not a point-sweep experiment")
    return tasks


@dataclass
class RunOutcome:
    exit_code: int
    output_files: list[Path]
    manifest_path: Path
    n_ok: int
    n_failed: int


def _prefix(config: ExperimentConfig) -> str:
    stem = config.kind.replace("-", "_")
    return f"{config.tag}_{stem}" if config.tag else stem


def _ensure_writable(out: str) -> Path:
    out_dir = Path(out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.touch()
        probe.unlink()
    except OSError as err:
        raise ConfigError(f"output directory {out_dir} is not writable: {err}") from err
    return out_dir


def run(config: ExperimentConfig) -> RunOutcome:
    """Execute a point-sweep experiment and write CSVs plus a manifest."""
    started = time.time()
    _ensure_writable(config.out)
    tasks = _build_tasks(config)
    if config.workers == 1:
        results = [_run_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_point, tasks, chunksize=1))

    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = _prefix(config)

    rows: list[dict] = []
    series_rows: list[dict] = []
    statuses = []
    for task, result in zip(tasks, results):
        entry = {k: v for k, v in task.items() if k not in ("times", "with_avg")}
        entry["status"] = result["status"]
        if result["status"] == "ok":
            rows.extend(result.get("rows", []))
            series_rows.extend(result.get("series_rows", []))
        else:
            entry["reason"] = result.get("reason", "")
        statuses.append(entry)

    outputs: list[Path] = []
    schema_key = "dyn-agg" if config.kind == "dyn-sweep" else config.kind
    outputs.append(csvio.write_csv(out_dir / f"{prefix}.csv", SCHEMAS[schema_key], rows))
    if config.kind == "dyn-sweep" and config.emit_series:
        outputs.append(
            csvio.write_csv(out_dir / f"{prefix}_series.csv", SCHEMAS["dyn-series"],
                            series_rows)
        )

    n_ok = sum(1 for s in statuses if s["status"] == "ok")
    manifest = {
        "tool": "starkqfi",
        "version": __version__,
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in vars(config).items()},
        "wall_clock_s": round(time.time() - started, 3),
        "points": statuses,
    }
    manifest_path = out_dir / f"{prefix}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")

    exit_code = 0 if n_ok else 2
    return RunOutcome(
        exit_code=exit_code,
        output_files=outputs,
        manifest_path=manifest_path,
        n_ok=n_ok,
        n_failed=len(statuses) - n_ok,
    )


def run_fit(config: ExperimentConfig) -> RunOutcome:
    """Group-wise regression over an existing CSV; appends to fits.csv."""
    from .. import scaling

    started = time.time()
    _ensure_writable(config.out)
    header, records = csvio.read_csv(config.input)
    for col in (config.group_by, config.fit_x, config.fit_y):
        if col not in header:
            raise ConfigError(f"{config.input}: missing column {col!r}")
    fitters = {
        "exp-L": scaling.fit_exponential_in_L,
        "power": scaling.fit_power_law,
        "hmax": scaling.fit_hmax_scaling,
    }
    if config.fit_kind not in fitters:
        raise ConfigError(f"unknown fit_kind {config.fit_kind!r} "
                          f"(expected one of {sorted(fitters)})")
    fitter = fitters[config.fit_kind]

    groups: dict[str, list[tuple[float, float]]] = {}
    for rec in records:
        groups.setdefault(rec[config.group_by], []).append(
            (float(rec[config.fit_x]), float(rec[config.fit_y]))
        )
    rows = []
    slopes = []
    for group in sorted(groups, key=float):
        pts = sorted(groups[group])
        fit = fitter([p[0] for p in pts], [p[1] for p in pts])
        slopes.append((float(group), fit.slope))
        rows.append(dict(group=group, kind=config.fit_kind, slope=fit.slope,
                         intercept=fit.intercept, r2=fit.r_squared,
                         win_lo=fit.window[0], win_hi=fit.window[1], n=fit.n_points))
    if len(slopes) >= 3:
        meta = scaling.meta_fit_linear_in_a([s[0] for s in slopes], [s[1] for s in slopes])
        rows.append(dict(group="meta", kind=f"{config.fit_kind}-meta", slope=meta.slope,
                         intercept=meta.intercept, r2=meta.r_squared,
                         win_lo=meta.window[0], win_hi=meta.window[1], n=meta.n_points))

    out_dir = Path(config.out)
    path = csvio.append_csv(out_dir / "fits.csv", SCHEMAS["fits"], rows)
    manifest_path = out_dir / f"{_prefix(config)}_manifest.json"
    manifest_path.write_text(json.dumps({
        "tool": "starkqfi",
        "version": __version__,
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in vars(config).items()},
        "wall_clock_s": round(time.time() - started, 3),
        "points": [{"group": r["group"], "status": "ok"} for r in rows],
    }, indent=1, sort_keys=True) + "\n")
    return RunOutcome(0, [path], manifest_path, len(rows), 0)
