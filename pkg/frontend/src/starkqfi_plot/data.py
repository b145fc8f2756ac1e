"""CSV loading for figure rendering: column validation and input checksums.

This package never recomputes physics; it only reshapes sweep files into
axes.  Every figure embeds a checksum of the exact input bytes so a figure
can be traced back to the data files that produced it.
"""
from __future__ import annotations

import csv
import hashlib
from pathlib import Path


class MissingInputError(FileNotFoundError):
    """A required CSV file is absent; the message names it."""


class MissingColumnError(KeyError):
    """A required CSV column is absent; the message names it."""

    def __init__(self, path: Path, column: str):
        self.column = column
        super().__init__(f"{path}: missing required column {column!r}")

    def __str__(self) -> str:  # KeyError quotes its payload otherwise
        return self.args[0]


class Table:
    """A small column-oriented view of one CSV file."""

    def __init__(self, path: Path, fieldnames: list[str], rows: list[dict[str, str]]):
        self.path = path
        self.fieldnames = fieldnames
        self.rows = rows

    def require(self, *columns: str) -> None:
        for column in columns:
            if column not in self.fieldnames:
                raise MissingColumnError(self.path, column)

    def floats(self, column: str) -> list[float]:
        self.require(column)
        return [float(row[column]) for row in self.rows]

    def strings(self, column: str) -> list[str]:
        self.require(column)
        return [row[column] for row in self.rows]

    def groups(self, column: str) -> list[str]:
        """Distinct values of a column in first-appearance order."""
        self.require(column)
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row[column])
        return list(seen)

    def where(self, column: str, value: str) -> "Table":
        self.require(column)
        return Table(self.path, self.fieldnames,
                     [row for row in self.rows if row[column] == value])


def load_table(path: Path) -> Table:
    if not path.is_file():
        raise MissingInputError(f"required input file {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingColumnError(path, "<header>")
        return Table(path, list(reader.fieldnames), list(reader))


def checksum(paths: list[Path]) -> str:
    digest = hashlib.sha256()
    for path in sorted(paths):
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()
