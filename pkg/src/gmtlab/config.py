"""Run configuration and frozen calibration constants."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields

from .errors import GmtError

# Fitted once by scripts/calibrate.py on the reference sphere (mesh 4, 20 sample
# points, s in [0.05, 0.5], lambda = 2) and frozen here; see that script.
DENSITY_C = 179.0
COVERING_K = 0.024


@dataclass
class Calibration:
    density_C: float = DENSITY_C
    covering_K: float = COVERING_K


@dataclass
class Tolerances:
    mass_rel: float = 0.01
    hausdorff_rel: float = 0.05
    flat_rel: float = 0.10
    exponent_abs: float = 0.15
    graph_rel: float = 0.10
    area_abs: float = 1e-9
    mass_floor: float = 1.0
    collapse_ratio: float = 0.2


@dataclass
class RunConfig:
    command: str = ""
    out: str = "out"
    format: str = "json"
    seed: int = 0
    mesh: int | None = None
    grid: list | None = None
    workers: int = 1
    inputs: dict = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)
    calibration: Calibration = field(default_factory=Calibration)

    def to_dict(self) -> dict:
        return asdict(self)

    def update(self, pairs: dict) -> "RunConfig":
        """Apply ``key=value`` overrides; dotted keys reach tolerances/calibration."""
        for key, raw in pairs.items():
            target, name = self, key
            if "." in key:
                head, name = key.split(".", 1)
                if head not in ("tolerances", "calibration"):
                    raise GmtError(f"unknown config key {key!r}")
                target = getattr(self, head)
            known = {f.name: f for f in fields(target)}
            if name not in known or name in ("inputs", "tolerances", "calibration"):
                raise GmtError(f"unknown config key {key!r}")
            setattr(target, name, _coerce(key, raw, getattr(target, name)))
        return self


def _coerce(key, raw, current):
    if not isinstance(raw, str):
        return raw
    try:
        if key.endswith("grid"):
            return [float(x) for x in raw.split(",") if x.strip()]
        if isinstance(current, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(current, int) or key.endswith("mesh") or key.endswith("seed") or key.endswith("workers"):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError:
        raise GmtError(f"config field {key!r}: cannot parse {raw!r}") from None
    return raw


def parse_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise GmtError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def worker_count(default: int = 1) -> int:
    raw = os.environ.get("GMTLAB_WORKERS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise GmtError("GMTLAB_WORKERS must be an integer") from None
