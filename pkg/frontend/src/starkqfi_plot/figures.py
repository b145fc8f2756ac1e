"""Figure registry: one renderer per reference panel.

Each renderer reads the figure-named CSV (plus fits.csv / bound_check.csv
overlays where the panel shows fitted lines), draws with the panel's axis
scales, and returns the list of input files that went into the drawing.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .data import MissingInputError, Table, checksum, load_table

MARKERS = "osD^v<>ph"


def _fit_overlays(data_dir: Path, kind: str) -> Table | None:
    path = data_dir / "fits.csv"
    if not path.is_file():
        return None
    fits = load_table(path)
    fits.require("group", "kind", "slope", "intercept")
    rows = [r for r in fits.rows if r["kind"] == kind]
    return Table(path, fits.fieldnames, rows) if rows else None


def _draw_exp_fits(ax, fits: Table, x_lo: float, x_hi: float) -> None:
    xs = [x_lo + (x_hi - x_lo) * i / 60 for i in range(61)]
    for row in fits.rows:
        slope, intercept = float(row["slope"]), float(row["intercept"])
        ax.plot(xs, [math.exp(slope * x + intercept) for x in xs],
                "-", lw=1.0, alpha=0.8)


def _scaling_panel(figure_id, data_dir, ax, value_col, fit_kind, ylabel):
    """Semilog-y value vs L per gradient rate, with fitted lines."""
    table = load_table(data_dir / f"{figure_id}.csv")
    table.require("a", "L", value_col)
    used = [table.path]
    for i, a in enumerate(table.groups("a")):
        sub = table.where("a", a)
        ax.plot(sub.floats("L"), sub.floats(value_col),
                MARKERS[i % len(MARKERS)], ms=4, label=f"a = {float(a):g}")
    fits = _fit_overlays(data_dir, fit_kind)
    if fits is not None:
        Ls = table.floats("L")
        _draw_exp_fits(ax, Table(fits.path, fits.fieldnames,
                                 [r for r in fits.rows if r["group"] != "meta"]),
                       min(Ls), max(Ls))
        used.append(fits.path)
    ax.set_yscale("log")
    ax.set_xlabel("L")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    return used


def _curve_panel(figure_id, data_dir, ax, group_col, value_col, xlabel, ylabel,
                 x_col="h"):
    """Log-log value vs field (or time) with one line per group."""
    table = load_table(data_dir / f"{figure_id}.csv")
    table.require(group_col, x_col, value_col)
    for i, g in enumerate(table.groups(group_col)):
        sub = table.where(group_col, g)
        xs, ys = sub.floats(x_col), sub.floats(value_col)
        pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "-",
                lw=1.2, label=f"{group_col} = {g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    return [table.path]


def fig1a(data_dir, ax):
    return _curve_panel("fig1a", data_dir, ax, "L", "qfi", "h", "F_Q")


def fig2a(data_dir, ax):
    return _curve_panel("fig2a", data_dir, ax, "L", "qfi", "h", "F_Q")


def fig3a(data_dir, ax):
    return _curve_panel("fig3a", data_dir, ax, "L", "qfi", "h", "F_Q")


def fig1b(data_dir, ax):
    used = _scaling_panel("fig1b", data_dir, ax, "qfi_h0", "fig1-beta-h0", "F_Q")
    bound_path = data_dir / "bound_check.csv"
    if bound_path.is_file():
        bound = load_table(bound_path)
        bound.require("L", "a", "bound_log")
        for a in bound.groups("a"):
            sub = bound.where("a", a)
            ax.plot(sub.floats("L"), [math.exp(v) for v in sub.floats("bound_log")],
                    "--", lw=0.9, alpha=0.7)
        used.append(bound_path)
    return used


def fig2b(data_dir, ax):
    return _scaling_panel("fig2b", data_dir, ax, "qfi_h0", "fig2-beta-h0", "F_Q")


def fig3b(data_dir, ax):
    return _scaling_panel("fig3b", data_dir, ax, "qfi_h0", "fig3-beta-h0", "F_Q")


def fig1c(data_dir, ax):
    return _scaling_panel("fig1c", data_dir, ax, "h_max", "fig1-aprime", "h_max")


def fig2c(data_dir, ax):
    return _scaling_panel("fig2c", data_dir, ax, "h_max", "fig2-aprime", "h_max")


def _gap_panel(figure_id, data_dir, ax):
    table = load_table(data_dir / f"{figure_id}.csv")
    table.require("L", "a", "gap")
    for i, a in enumerate(table.groups("a")):
        sub = table.where("a", a)
        ax.plot(sub.floats("L"), sub.floats("gap"), MARKERS[i % len(MARKERS)],
                ms=4, label=f"a = {float(a):g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("L")
    ax.set_ylabel("gap")
    ax.legend(fontsize=7)
    return [table.path]


def fig4a(data_dir, ax):
    return _gap_panel("fig4a", data_dir, ax)


def fig4b(data_dir, ax):
    return _gap_panel("fig4b", data_dir, ax)


def fig5a(data_dir, ax):
    return _curve_panel("fig5a", data_dir, ax, "L", "qfi", "t", "F_Q", x_col="t")


def fig5b(data_dir, ax):
    return _curve_panel("fig5b", data_dir, ax, "L", "qfi_avg", "h", "time-averaged F_Q")


def fig5c(data_dir, ax):
    return _scaling_panel("fig5c", data_dir, ax, "qfi_avg_h0", "fig5-beta-h0",
                          "time-averaged F_Q")


def fig5d(data_dir, ax):
    return _scaling_panel("fig5d", data_dir, ax, "h_max", "fig5-aprime", "h_max")


def fig6a(data_dir, ax):
    return _curve_panel("fig6a", data_dir, ax, "regime", "qfi", "t", "F_Q", x_col="t")


def fig6b(data_dir, ax):
    return _curve_panel("fig6b", data_dir, ax, "a", "qfi_over_t2", "h", "F_Q / t^2")


def fig6c(data_dir, ax):
    return _curve_panel("fig6c", data_dir, ax, "L", "qfi_over_t2", "h", "F_Q / t^2")


def fig6d(data_dir, ax):
    return _scaling_panel("fig6d", data_dir, ax, "fom_peak", "fig6-beta-hmax",
                          "peak F_Q / t^2")


def table1(data_dir, ax):
    """Rendered table of the fitted scaling exponents."""
    fits = load_table(data_dir / "fits.csv")
    fits.require("group", "kind", "slope", "intercept", "r2")
    ax.axis("off")
    cells = [["kind", "group", "slope", "intercept", "r2"]]
    for row in fits.rows:
        cells.append([row["kind"], row["group"], f"{float(row['slope']):.4f}",
                      f"{float(row['intercept']):.4f}", f"{float(row['r2']):.4f}"])
    table = ax.table(cellText=cells[1:], colLabels=cells[0], loc="center")
    table.auto_set_font_size(False)
    table.set_fontsize(7)
    return [fits.path]


RENDERERS = {
    "fig1a": fig1a, "fig1b": fig1b, "fig1c": fig1c,
    "fig2a": fig2a, "fig2b": fig2b, "fig2c": fig2c,
    "fig3a": fig3a, "fig3b": fig3b,
    "fig4a": fig4a, "fig4b": fig4b,
    "fig5a": fig5a, "fig5b": fig5b, "fig5c": fig5c, "fig5d": fig5d,
    "fig6a": fig6a, "fig6b": fig6b, "fig6c": fig6c, "fig6d": fig6d,
    "table1": table1,
}


def render(figure_id: str, data_dir: str | Path, out_dir: str | Path,
           fmt: str = "svg") -> Path:
    """Draw one figure from its CSVs; returns the written file path."""
    if figure_id not in RENDERERS:
        raise MissingInputError(
            f"unknown figure id {figure_id!r}; expected one of {sorted(RENDERERS)}"
        )
    data_dir = Path(data_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.2, 3.2), dpi=150)
    try:
        used = RENDERERS[figure_id](data_dir, ax)
        ax.set_title(figure_id)
        fig.tight_layout()
        out_path = out_dir / f"{figure_id}.{fmt}"
        fig.savefig(out_path, format=fmt,
                    metadata={"Description": f"inputs sha256 {checksum(used)}"}
                    if fmt == "svg" else None)
    finally:
        plt.close(fig)
    return out_path
