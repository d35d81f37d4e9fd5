"""Result tables with deterministic CSV/JSON emission.

CSV layout: ``# key: <json>`` metadata comment lines, then a header row, then
data rows.  Floats are written with ``repr`` (shortest round-trip form, up to
17 significant digits) so files parse back losslessly; reruns with the same
config and seed are byte-identical because nothing time- or host-dependent
is ever written.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

Cell = float | int | str


def _as_cell(v) -> Cell:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return int(v)
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"non-finite cell value {v!r}")
    return x


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[Cell]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [str(c) for c in self.columns]
        clean = []
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row length does not match columns")
            clean.append([_as_cell(v) for v in row])
        self.rows = clean

    def column(self, name: str) -> list[Cell]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    # -- serialization ------------------------------------------------------

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {json.dumps(value)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_format_cell(v) for v in row])
        return buf.getvalue()

    def to_json_text(self) -> str:
        meta = dict(self.metadata)
        meta["columns"] = self.columns
        return json.dumps({"metadata": meta, "rows": self.rows}, indent=2) + "\n"

    def write(self, path, fmt: str = "csv") -> None:
        text = self.to_csv_text() if fmt == "csv" else self.to_json_text()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _format_cell(v: Cell) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_cell(text: str) -> Cell:
    try:
        x = float(text)
    except ValueError:
        return text
    if text.strip().lstrip("+-").isdigit():
        return int(text)
    return x


def read_csv(path) -> ResultTable:
    metadata: dict = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("# "):
            key, _, raw = line[2:].partition(": ")
            metadata[key] = json.loads(raw)
            body_start = i + 1
        else:
            break
    reader = csv.reader(lines[body_start:])
    table = list(reader)
    if not table:
        raise ValueError(f"{path}: no header row")
    columns = table[0]
    rows = [[_parse_cell(c) for c in row] for row in table[1:] if row]
    return ResultTable(columns, rows, metadata)


def read_json(path) -> ResultTable:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    meta = dict(doc["metadata"])
    columns = meta.pop("columns")
    return ResultTable(columns, doc["rows"], meta)
