"""Report bundles: CSV tables plus a summary derived from them."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """17 significant digits: a lossless float64 round trip."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)

    @classmethod
    def from_columns(cls, name, **cols):
        keys = list(cols)
        arrays = [np.atleast_1d(np.asarray(cols[k])) for k in keys]
        return cls(name, keys, [list(r) for r in zip(*arrays)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def to_text(self) -> str:
        cells = [self.columns] + [[fmt(v) for v in r] for r in self.rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(self.columns))]
        return "\n".join(
            "  ".join(c[i].rjust(widths[i]) for i in range(len(c))) for c in cells
        ) + "\n"


@dataclass
class ReportBundle:
    """Tables, scalar metrics and the exit status of one run.

    Every metric is written to ``metrics.csv``; ``summary.json`` and
    ``summary.txt`` are rendered from the same values.
    """

    command: str
    name: str
    tables: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    verdict: str = ""
    exit_code: int = 0

    def metrics_table(self) -> Table:
        return Table("metrics", ["name", "value"], [[k, v] for k, v in self.metrics.items()])

    def summary(self) -> dict:
        return {
            "command": self.command,
            "name": self.name,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "metrics": {k: _jsonable(v) for k, v in self.metrics.items()},
            "tables": [t.name + ".csv" for t in self.tables],
        }

    def summary_text(self) -> str:
        lines = [f"{self.command}: {self.name}", f"verdict: {self.verdict}", f"exit: {self.exit_code}"]
        lines += [f"  {k} = {fmt(v)}" for k, v in self.metrics.items()]
        return "\n".join(lines) + "\n"

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for t in self.tables + [self.metrics_table()]:
            (out / f"{t.name}.csv").write_text(t.to_csv())
        (out / "summary.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        (out / "summary.txt").write_text(self.summary_text())
        return out

    def render(self, format="csv") -> str:
        parts = []
        for t in self.tables + [self.metrics_table()]:
            body = t.to_csv() if format == "csv" else t.to_text()
            parts.append(f"# {t.name}\n{body}")
        return "\n".join(parts)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return str(v)


def read_csv(path) -> tuple[list, list]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _num(s):
    try:
        return float(s)
    except ValueError:
        return s


# metric name -> (table, column, reducer) for values that must be re-derivable
DERIVED = {
    "min_condition_margin": ("potential", "margin", min),
    "max_abs_h": ("potential", "h", lambda v: max(abs(x) for x in v)),
    "boundary_centroid_x": ("boundary", "x", lambda v: math.fsum(v) / len(v)),
    "energy_1d": ("slices", "F", min),
}


def validate_report(out_dir) -> list[str]:
    """Re-derive the summary from the CSV files; returns a list of problems."""
    out = Path(out_dir)
    problems = []
    summary = json.loads((out / "summary.json").read_text())
    head, rows = read_csv(out / "metrics.csv")
    if head != ["name", "value"]:
        problems.append("metrics.csv has an unexpected header")
    metrics = {r[0]: _num(r[1]) for r in rows}
    for k, v in summary["metrics"].items():
        m = metrics.get(k)
        if isinstance(v, str):
            ok = str(m) == v or (isinstance(m, float) and repr(m) == v)
        else:
            ok = isinstance(m, float) and m == float(v)
        if not ok:
            problems.append(f"summary metric {k}={v!r} does not match metrics.csv ({m!r})")
    for t in summary["tables"]:
        if not (out / t).exists():
            problems.append(f"missing table {t}")
    for k, (table, col, reduce) in DERIVED.items():
        if k not in metrics or not (out / f"{table}.csv").exists():
            continue
        head, rows = read_csv(out / f"{table}.csv")
        values = [float(r[head.index(col)]) for r in rows]
        if reduce(values) != metrics[k]:
            problems.append(f"{k}={metrics[k]!r} is not re-derivable from {table}.csv")
    return problems
