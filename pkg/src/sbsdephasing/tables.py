"""Result tables and their CSV serialization."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence


def format_value(v: Any) -> str:
    if isinstance(v, (bool,)):
        return "1" if v else "0"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, str):
        return v
    x = float(v)
    if math.isnan(x):
        raise ValueError("NaN is not allowed in a result table")
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".17g")          # + 0.0 turns -0.0 into 0.0


@dataclass
class ResultTable:
    """Rectangular numeric table with a metadata header."""

    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.metadata.items():
            buf.write(f"# {key} = {val}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([format_value(v) for v in r])
        return buf.getvalue()

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path


def read_csv(path) -> ResultTable:
    """Parse a file written by :meth:`ResultTable.write` (values as floats)."""
    meta, lines = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
        elif line:
            lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    rows = [[float(x) for x in r] for r in reader]
    return ResultTable(columns, rows, meta)


def merge_columns(key: str, values: Sequence, series: dict) -> ResultTable:
    """Table with ``key`` as the first column and one column per series entry."""
    t = ResultTable([key, *series])
    for i, v in enumerate(values):
        t.add_row(v, *(series[name][i] for name in series))
    return t
