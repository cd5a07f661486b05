"""Report model and its three deterministic text renderings."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .checks import Check


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *row) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"table {self.name}: expected {len(self.columns)} values, got {len(row)}")
        self.rows.append(list(row))


@dataclass
class Report:
    task: str
    meta: dict
    tables: list[Table] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check_table(self) -> Table:
        t = Table("checks", ["suite", "check", "value", "target", "tol", "pass"])
        for c in self.checks:
            t.add(c.suite, c.name, c.value, c.target, c.tol, c.passed)
        return t

    def all_tables(self) -> list[Table]:
        return [*self.tables, self.check_table()]


def _cell(x, fmt: str) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        x = x + 0.0  # no negative zero
        return format(x, fmt)
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x) + 0.0
        return x if math.isfinite(x) else str(x)
    return x


def to_human(rep: Report) -> str:
    out = io.StringIO()
    out.write(f"lw6 {rep.task} report\n")
    for key in sorted(k for k in rep.meta if k != "scenario"):
        out.write(f"{key}: {rep.meta[key]}\n")
    for t in rep.all_tables():
        out.write(f"\n== {t.name} ==\n")
        cells = [t.columns] + [[_cell(x, ".6e") for x in row] for row in t.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(t.columns))]
        for r in cells:
            out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    n_fail = sum(not c.passed for c in rep.checks)
    out.write(f"\n{len(rep.checks) - n_fail} of {len(rep.checks)} checks passed\n")
    out.write(f"status: {'PASS' if rep.passed else 'FAIL'}\n")
    return out.getvalue()


def to_csv(rep: Report) -> str:
    """Tables in sequence, each preceded by a ``# table: <name>`` line."""
    out = io.StringIO()
    for i, t in enumerate(rep.all_tables()):
        if i:
            out.write("\n")
        out.write(f"# table: {t.name}\n")
        out.write(",".join(t.columns) + "\n")
        for row in t.rows:
            out.write(",".join(_cell(x, ".17g") for x in row) + "\n")
    return out.getvalue()


def to_structured(rep: Report) -> str:
    doc = {
        "task": rep.task,
        "meta": rep.meta,
        "tables": {t.name: {"columns": t.columns, "rows": [[_json_value(x) for x in r] for r in t.rows]}
                   for t in rep.all_tables()},
        "status": "pass" if rep.passed else "fail",
    }
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


FORMATS = {"human": to_human, "csv": to_csv, "structured": to_structured}


def emit_report(rep: Report, fmt: str = "human") -> bytes:
    return FORMATS[fmt](rep).encode("utf-8")


CSV_COLUMNS = """CSV layout: one block per table, introduced by '# table: <name>', then a header row.
  flux        quantity, index, closed, numeric, residual, tol, pass, r, tau0, tau1
  sweep_data  r, then total flux components p0..p5 (and M01..M45 for tube sweeps)
  sweep_fit   quantity, exponent, expected, deviation, tol, pass, coefficient_norm
  spin        component, expected, fitted, residual, tol, pass
  trajectory  tau, z0..z5, u0..u5, a0..a5, drift, drift_bound, pass, p0..p5, s2
  field_samples  sample, tau_ret, r, field_order, gauge_order, wave_order, tol, pass
  checks      suite, check, value, target, tol, pass   (pass: |value-target| <= tol, or value <= tol)"""
