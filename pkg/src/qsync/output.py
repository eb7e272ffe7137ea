"""Deterministic CSV and JSON-sidecar emission.

CSV files start with '#'-prefixed description lines, then a regular header
row, then data rows.  Floats are written with shortest round-trip repr so
identical runs give byte-identical files; complex quantities are split
into _re/_im columns by the callers.
"""

import json
import numpy as np

__all__ = [
    "format_value",
    "write_csv",
    "sidecar_path",
    "write_sidecar",
    "IncrementalCsvWriter",
    "count_data_rows",
]


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, str):
        if "," in v or "\n" in v:
            raise ValueError(f"CSV field {v!r} needs quoting, which is not supported")
        return v
    raise TypeError(f"cannot format {type(v).__name__} into CSV (split complex values first)")


def write_csv(path, comments, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def sidecar_path(path) -> str:
    return str(path) + ".meta.json"


def write_sidecar(path, metadata: dict):
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def count_data_rows(path, columns) -> int:
    """Complete data rows already present in a CSV (for sweep resume)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except FileNotFoundError:
        return 0
    header = ",".join(columns)
    rows = 0
    seen_header = False
    for line in lines:
        if not line or line.startswith("#"):
            continue
        if not seen_header:
            if line != header:
                raise ValueError(f"existing output {path} has a different header; refusing to resume")
            seen_header = True
            continue
        if line.count(",") == len(columns) - 1:
            rows += 1
    return rows if seen_header else 0


class IncrementalCsvWriter:
    """Row-at-a-time CSV writer with flush-per-row (interruptible sweeps)."""

    def __init__(self, path, comments, columns, append=False):
        self.path = path
        self.columns = list(columns)
        mode = "a" if append else "w"
        self._fh = open(path, mode, encoding="utf-8", newline="\n")
        if not append:
            for line in comments:
                self._fh.write(f"# {line}\n")
            self._fh.write(",".join(self.columns) + "\n")
            self._fh.flush()

    def write_row(self, row):
        if len(row) != len(self.columns):
            raise ValueError("row length does not match columns")
        self._fh.write(",".join(format_value(v) for v in row) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
