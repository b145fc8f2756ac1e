"""Deterministic CSV output: 17 significant digits, '.' decimal, '\n' endings."""
from __future__ import annotations

import csv
from pathlib import Path


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: str | Path, header: list[str], rows: list[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(row[col]) for col in header])
    return path


def append_csv(path: str | Path, header: list[str], rows: list[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(row[col]) for col in header])
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV")
        return list(reader.fieldnames), list(reader)


def upsert_csv(path: str | Path, header: list[str], rows: list[dict],
               key: str) -> Path:
    """Replace rows sharing a key value with the new rows; keeps reruns of
    the same preset idempotent (byte-identical output files)."""
    path = Path(path)
    new_keys = {format_cell(row[key]) for row in rows}
    kept: list[dict] = []
    if path.exists():
        _, old = read_csv(path)
        kept = [row for row in old if row[key] not in new_keys]
    return write_csv(path, header, kept + rows)
