"""Tabular experiment output with deterministic CSV/JSON rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["ExperimentReport", "format_cell"]


def format_cell(v) -> str:
    """Render a cell: floats at 17 significant digits, '.' decimal, no locale."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


@dataclass
class ExperimentReport:
    columns: tuple
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def append(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row width {len(row)} != {len(self.columns)} columns")
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self, include_meta: bool = False) -> str:
        lines = []
        if include_meta and self.meta:
            lines.append("# " + json.dumps(self.meta, sort_keys=True))
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(format_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path, include_meta: bool = False) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv(include_meta=include_meta))
