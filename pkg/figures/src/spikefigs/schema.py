"""CSV schema validation for the documented artifact formats."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class SchemaMismatch(Exception):
    """Raised when a CSV is empty or lacks required columns."""

    def __init__(self, path, missing: list[str]):
        self.path = str(path)
        self.missing = list(missing)
        if missing:
            detail = "missing columns: " + ", ".join(missing)
        else:
            detail = "empty file"
        super().__init__(f"{path}: {detail}")


# column contracts for each artifact kind
SCHEMAS = {
    "snapshots": ["t", "x", "u", "v", "w"],
    "track": ["t", "spike_id", "position", "amplitude", "count"],
    "branch": ["arclength", "Dv", "mu", "v0", "fold"],
    "spectral": ["lam", "re", "im"],
    "summary": ["quantity", "value", "tolerance", "source"],
}


def read_table(path, required: list[str]) -> dict[str, list[str]]:
    """Read a CSV into per-column string lists, enforcing `required` columns.

    Raises SchemaMismatch when the file has no header row or when any
    required column is absent; the exception carries the full list of
    missing columns so callers can report them all at once.
    """
    p = Path(path)
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(p, required) from None
        header = [h.strip() for h in header]
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaMismatch(p, missing)
        cols: dict[str, list[str]] = {h: [] for h in header}
        for row in reader:
            for h, val in zip(header, row):
                cols[h].append(val)
    return cols


def column(table: dict[str, list[str]], name: str) -> np.ndarray:
    return np.asarray(table[name], dtype=float)
