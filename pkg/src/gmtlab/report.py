"""Experiment reports and their byte-stable JSON / CSV serialization."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

VERDICTS = ("pass", "fail", "inconclusive")


@dataclass
class Series:
    name: str
    grid: list
    measured: list
    bound: list | None = None


@dataclass
class ExperimentReport:
    name: str
    inputs: dict
    series: list = field(default_factory=list)
    verdict: str = "pass"
    classification: str | None = None
    tolerances: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    subchecks: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")

    def add(self, name, grid, measured, bound=None) -> Series:
        s = Series(name, list(grid), list(measured), None if bound is None else list(bound))
        self.series.append(s)
        return s

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "series": [{"name": s.name, "grid": s.grid, "measured": s.measured, "bound": s.bound}
                       for s in self.series],
            "verdict": self.verdict,
            "classification": self.classification,
            "tolerances": self.tolerances,
            "notes": self.notes,
            "subchecks": self.subchecks,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        r = cls(d["name"], d["inputs"], [], d["verdict"], d.get("classification"),
                d.get("tolerances", {}), d.get("notes", {}), d.get("subchecks", {}))
        for s in d.get("series", []):
            r.series.append(Series(s["name"], s["grid"], s["measured"], s.get("bound")))
        return r


def plain(obj):
    """Convert to JSON-ready values: floats at 12 significant digits, rationals exact."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float("%.12g" % x)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [plain(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def content_hash(obj) -> str:
    return hashlib.sha256(json.dumps(plain(obj), sort_keys=True).encode()).hexdigest()


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "series", "grid", "measured", "bound", "verdict"])
    for s in report.series:
        bound = s.bound if s.bound is not None else [None] * len(s.grid)
        for g, m, b in zip(s.grid, s.measured, bound):
            w.writerow([report.name, s.name, plain(g), plain(m), "" if b is None else plain(b), report.verdict])
    return buf.getvalue()


def write_atomic(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def emit_report(report: ExperimentReport, path, fmt: str = "json", config: dict | None = None) -> Path:
    """Write ``report`` to ``path`` as JSON (with provenance) or flattened CSV."""
    if fmt == "csv":
        return write_atomic(path, report_csv(report))
    if fmt != "json":
        raise ValueError(f"unknown format {fmt!r}")
    body = report.to_dict()
    doc = {"report": body, "provenance": {"config": config or {}, "content_hash": content_hash(body)}}
    return write_atomic(path, dumps(doc))
