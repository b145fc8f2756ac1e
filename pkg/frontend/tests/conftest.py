"""Synthetic miniature sweep CSVs matching the harness schemas."""
import csv
import math
from pathlib import Path

import pytest


def write_rows(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


@pytest.fixture
def data_dir(tmp_path):
    """A directory holding one small CSV per figure id, plus fits + bound."""
    sizes = [50, 100, 150]
    rates = [0.02, 0.05]
    hs = [1e-6, 1e-4, 1e-2, 1.0]
    ts = [1.0, 10.0, 100.0]

    curve = [[a, L, h, math.exp(0.1 * L) / (1 + (h / 1e-3) ** 2)]
             for a in [0.04] for L in sizes for h in hs]
    for name in ("fig1a", "fig2a", "fig3a"):
        write_rows(tmp_path / f"{name}.csv", ["a", "L", "h", "qfi"], curve)

    scaling_rows = [[a, L, math.exp((1.6 * a) * L), math.exp((1.8 * a) * L)]
                    for a in rates for L in sizes]
    write_rows(tmp_path / "fig1b.csv", ["a", "L", "qfi_h0", "qfi_hmax"], scaling_rows)
    write_rows(tmp_path / "fig2b.csv", ["a", "L", "qfi_h0", "qfi_hmax"], scaling_rows)
    write_rows(tmp_path / "fig3b.csv", ["a", "L", "qfi_h0"],
               [r[:3] for r in scaling_rows])

    hmax_rows = [[a, L, math.exp(-a * L)] for a in rates for L in sizes]
    write_rows(tmp_path / "fig1c.csv", ["a", "L", "h_max"], hmax_rows)
    write_rows(tmp_path / "fig2c.csv", ["a", "L", "h_max"], hmax_rows)

    gap_rows = [["sp", L, a, 3 * math.pi**2 / (L + 1) ** 2] for a in rates for L in sizes]
    write_rows(tmp_path / "fig4a.csv", ["probe", "L", "a", "gap"], gap_rows)
    write_rows(tmp_path / "fig4b.csv", ["probe", "L", "a", "gap"], gap_rows)

    write_rows(tmp_path / "fig5a.csv", ["a", "L", "t", "qfi"],
               [[0.05, L, t, t**2 * L] for L in sizes for t in ts])
    write_rows(tmp_path / "fig5b.csv", ["a", "L", "h", "qfi_avg"],
               [[0.05, L, h, L / (1 + (h / 1e-2) ** 2)] for L in sizes for h in hs])
    write_rows(tmp_path / "fig5c.csv", ["a", "L", "qfi_avg_h0"],
               [[0.05, L, math.exp(0.09 * L)] for L in sizes])
    write_rows(tmp_path / "fig5d.csv", ["a", "L", "h_max", "qfi_avg_peak"],
               [[0.05, L, math.exp(-0.05 * L), math.exp(0.1 * L)] for L in sizes])

    write_rows(tmp_path / "fig6a.csv", ["a", "L", "regime", "h", "t", "qfi"],
               [[0.02, 14, regime, h, t, t**2 / (1 + h)]
                for regime, h in (("ergodic", 0.01), ("transition", 1.0),
                                  ("localized", 10.0)) for t in ts])
    fom_rows = [[a, L, h, L * h / (1 + h**2)]
                for a in [0.02] for L in (6, 8) for h in hs]
    write_rows(tmp_path / "fig6b.csv", ["a", "L", "h", "qfi_over_t2"], fom_rows)
    write_rows(tmp_path / "fig6c.csv", ["a", "L", "h", "qfi_over_t2"], fom_rows)
    write_rows(tmp_path / "fig6d.csv", ["a", "L", "fom_h0", "fom_peak", "h_peak"],
               [[0.02, L, math.exp(0.7 * L), math.exp(0.3 * L), 2.0] for L in (6, 8, 10)])

    write_rows(tmp_path / "fits.csv",
               ["group", "kind", "slope", "intercept", "r2", "win_lo", "win_hi", "n"],
               [["0.02", "fig1-beta-h0", 0.032, 0.0, 0.999, 50, 150, 3],
                ["0.05", "fig1-beta-h0", 0.080, 0.0, 0.999, 50, 150, 3],
                ["0.02", "fig1-aprime", -0.02, 0.0, 0.998, 50, 150, 3],
                ["meta", "fig1-beta-h0-meta", 1.6, 0.0, 1.0, 0.02, 0.05, 2]])
    write_rows(tmp_path / "bound_check.csv",
               ["L", "a", "bound_log", "qfi_log", "ok"],
               [[L, 0.02, 0.03 * L, 0.032 * L, "true"] for L in sizes])
    return tmp_path
