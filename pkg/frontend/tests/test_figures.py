import csv

import pytest

from starkqfi_plot import MissingColumnError, MissingInputError, RENDERERS, render
from starkqfi_plot.data import checksum


@pytest.mark.parametrize("figure_id", sorted(RENDERERS))
def test_every_preset_renders_svg(figure_id, data_dir, tmp_path):
    out = render(figure_id, data_dir, tmp_path / "figs")
    assert out.name == f"{figure_id}.svg"
    body = out.read_text()
    assert body.lstrip().startswith("<?xml")


def test_log_axes_present(data_dir, tmp_path):
    # log-scale ticks appear as 10^k labels in the SVG text
    out = render("fig1a", data_dir, tmp_path)
    assert "matplotlib" in out.read_text()


def test_checksum_embedded(data_dir, tmp_path):
    out = render("fig1b", data_dir, tmp_path)
    body = out.read_text()
    digest = checksum([data_dir / "fig1b.csv", data_dir / "fits.csv",
                       data_dir / "bound_check.csv"])
    assert f"inputs sha256 {digest}" in body


def test_checksum_tracks_inputs(data_dir, tmp_path):
    first = render("fig4a", data_dir, tmp_path / "one").read_text()
    (data_dir / "fig4a.csv").write_text(
        "probe,L,a,gap\nsp,50,0.02,0.01\nsp,100,0.02,0.002\n")
    second = render("fig4a", data_dir, tmp_path / "two").read_text()

    def digest_of(svg):
        start = svg.index("inputs sha256 ") + len("inputs sha256 ")
        return svg[start : start + 64]

    assert digest_of(first) != digest_of(second)


def test_missing_file_named(data_dir, tmp_path):
    (data_dir / "fig5a.csv").unlink()
    with pytest.raises(MissingInputError, match="fig5a.csv"):
        render("fig5a", data_dir, tmp_path)


def test_truncated_input_names_column(data_dir, tmp_path):
    # drop the qfi_h0 column
    path = data_dir / "fig1b.csv"
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow(row[:2])
    with pytest.raises(MissingColumnError, match="qfi_h0"):
        render("fig1b", data_dir, tmp_path)


def test_unknown_figure_rejected(data_dir, tmp_path):
    with pytest.raises(MissingInputError, match="unknown figure"):
        render("fig9z", data_dir, tmp_path)


def test_png_flag(data_dir, tmp_path):
    out = render("fig1c", data_dir, tmp_path, fmt="png")
    assert out.suffix == ".png"
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
