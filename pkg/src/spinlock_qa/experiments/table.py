"""Long-format result tables and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

FIXED_LEADING = ("experiment", "run_id")
FIXED_TRAILING = ("t_ns", "fidelity", "infidelity", "norm_drift")


@dataclass
class ResultTable:
    experiment: str
    param_keys: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        return [*FIXED_LEADING, *self.param_keys, *FIXED_TRAILING]

    def add(self, run_id: str, params: dict, t_ns: float, fidelity: float, norm_drift: float | None):
        if set(params) != set(self.param_keys):
            raise ValueError(f"row params {sorted(params)} do not match {self.param_keys}")
        self.rows.append(
            {
                "experiment": self.experiment,
                "run_id": run_id,
                **params,
                "t_ns": float(t_ns),
                "fidelity": float(fidelity),
                "infidelity": float(1.0 - fidelity),
                "norm_drift": None if norm_drift is None else float(norm_drift),
            }
        )

    def sort(self) -> "ResultTable":
        self.rows.sort(key=lambda r: (r["run_id"], r["t_ns"]))
        return self

    def where(self, **match) -> list[dict]:
        return [r for r in self.rows if all(r[k] == v for k, v in match.items())]

    def violations(self, norm_tol: float = 1e-6) -> list[str]:
        """Table-level invariant failures plus any failed checks recorded in metadata."""
        out = []
        for r in self.rows:
            if not 0.0 <= r["fidelity"] <= 1.0:
                out.append(f"{r['run_id']} t={r['t_ns']}: fidelity {r['fidelity']} outside [0, 1]")
            if r["norm_drift"] is not None and not r["norm_drift"] < norm_tol:
                out.append(f"{r['run_id']} t={r['t_ns']}: norm drift {r['norm_drift']:.3g}")
        for name, ok in self.metadata.get("checks", {}).items():
            if not ok:
                out.append(f"check failed: {name}")
        for err in self.metadata.get("errors", []):
            out.append(f"run failed: {err}")
        return out


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse_cell(text: str):
    if text == "":
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def export(table: ResultTable, path: str | Path, format: str = "csv") -> Path:
    """Write ``table`` to ``path``.

    CSV gets exactly the table columns as header, floats with 17 significant
    digits, and the metadata in a sidecar ``<path>.meta.json``. JSON is a
    single ``{"metadata": ..., "rows": [...]}`` object.
    """
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([format_cell(row[c]) for c in table.columns])
        meta = {"experiment": table.experiment, "param_keys": list(table.param_keys), **table.metadata}
        with open(meta_path(path), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True, allow_nan=True)
    elif format == "json":
        doc = {
            "metadata": {"experiment": table.experiment, "param_keys": list(table.param_keys), **table.metadata},
            "rows": table.rows,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True, allow_nan=True)
    else:
        raise ValueError(f"unknown format {format!r}")
    return path


def meta_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def read_table(path: str | Path, format: str | None = None) -> ResultTable:
    """Inverse of :func:`export`."""
    path = Path(path)
    format = format or ("json" if path.suffix == ".json" else "csv")
    if format == "json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        meta = dict(doc["metadata"])
        experiment = meta.pop("experiment")
        keys = tuple(meta.pop("param_keys"))
        return ResultTable(experiment, keys, doc["rows"], meta)
    mp = meta_path(path)
    meta = json.loads(mp.read_text(encoding="utf-8")) if mp.exists() else {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            row = {c: _parse_cell(v) for c, v in zip(header, raw)}
            for c in FIXED_TRAILING:
                if row[c] is not None:
                    row[c] = float(row[c])
            row["run_id"] = str(raw[1])
            row["experiment"] = str(raw[0])
            rows.append(row)
    keys = tuple(header[len(FIXED_LEADING) : len(header) - len(FIXED_TRAILING)])
    experiment = meta.pop("experiment", rows[0]["experiment"] if rows else "")
    meta.pop("param_keys", None)
    return ResultTable(experiment, keys, rows, meta)


