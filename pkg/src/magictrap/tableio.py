"""Result tables with unit-tagged columns and reproducible float formatting.

Every emitted number uses 12 significant digits, switching to scientific
notation for |x| < 1e-3 or |x| >= 1e6. Identical inputs therefore yield
byte-identical CSV/JSON, which the tests rely on for diffing.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["Column", "ResultTable", "fmt_float"]


def fmt_float(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    v = float(x)
    if v == 0.0:
        return "0"
    if math.isnan(v) or math.isinf(v):
        return repr(v)
    if abs(v) < 1e-3 or abs(v) >= 1e6:
        return f"{v:.11e}"
    return f"{v:.12g}"


@dataclass(frozen=True)
class Column:
    name: str
    unit: str   # "1" for dimensionless

    @property
    def header(self) -> str:
        return f"{self.name}[{self.unit}]"


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add_row(self, *cells):
        if len(cells) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} cells, got {len(cells)}")
        self.rows.append(list(cells))

    def _format_cell(self, cell):
        if isinstance(cell, str):
            return cell
        return fmt_float(cell)

    def to_csv(self, include_meta: bool = True) -> str:
        buf = io.StringIO()
        if include_meta:
            for key, value in self.meta.items():
                buf.write(f"# {key} = {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(col.header for col in self.columns)
        for row in self.rows:
            writer.writerow(self._format_cell(c) for c in row)
        return buf.getvalue()

    def to_json(self, include_meta: bool = True) -> str:
        def cell_value(cell):
            if isinstance(cell, str):
                return cell
            # round-trip through the canonical string so JSON carries the
            # same 12-significant-digit values as CSV
            return float(fmt_float(cell))

        doc = {
            "columns": [{"name": c.name, "unit": c.unit} for c in self.columns],
            "rows": [[cell_value(c) for c in row] for row in self.rows],
        }
        if include_meta:
            doc = {"meta": dict(self.meta), **doc}
        return json.dumps(doc, indent=1)

    def render(self, fmt: str, include_meta: bool = True) -> str:
        if fmt == "csv":
            return self.to_csv(include_meta)
        if fmt == "json":
            return self.to_json(include_meta)
        raise ValueError(f"unknown format {fmt!r}")
