"""JSON instance files.

Schema::

    {"model": "identical" | "unrelated", "m": int, "d": int,
     "jobs": [[...], ...]            # (n, d) or (n, m, d); FORBIDDEN as "inf"
     "volume": [...], "max_load": x, # optional, identical only
     "targets": [...], "norms": [...],   # optional; a norm of "inf" is MAKESPAN
     "adaptive": {"driver": name, "params": {...}},   # adaptive adversaries
     "hidden_assignment": [...]}     # planted-feasible only

Floats are written with Python's shortest round-trip repr, so finite values
survive a save/load cycle bit for bit.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import MAKESPAN, Instance, NormSpec


@dataclass
class InstanceFile:
    instance: Instance
    norm_spec: NormSpec | None = None
    adaptive: dict | None = None
    extra: dict = field(default_factory=dict)
    name: str = "instance"

    @property
    def is_adaptive(self) -> bool:
        return self.adaptive is not None


def _enc(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _encode_array(a: np.ndarray):
    if a.ndim == 0:
        return _enc(float(a))
    return [_encode_array(x) for x in a]


def _decode(x):
    if isinstance(x, list):
        return [_decode(v) for v in x]
    if x == "inf":
        return math.inf
    return float(x)


def _encode_norm(r):
    return "inf" if r is MAKESPAN else r


def _decode_norm(r):
    if r == "inf":
        return MAKESPAN
    return int(r) if isinstance(r, int) else float(r)


def to_dict(f: InstanceFile) -> dict:
    inst = f.instance
    out = {"model": inst.model, "m": inst.m, "d": inst.d, "jobs": _encode_array(inst.jobs)}
    if inst.volume is not None:
        out["volume"] = _encode_array(inst.volume)
    if inst.max_load is not None:
        out["max_load"] = inst.max_load
    if f.norm_spec is not None:
        out["targets"] = _encode_array(f.norm_spec.targets)
        out["norms"] = [_encode_norm(r) for r in f.norm_spec.exponents]
    if f.adaptive is not None:
        out["adaptive"] = f.adaptive
    out.update(f.extra)
    return out


def from_dict(data: dict, name: str = "instance") -> InstanceFile:
    missing = [k for k in ("model", "m", "d") if k not in data]
    if missing:
        raise ValueError(f"not an instance file: missing {', '.join(missing)}")
    model, m, d = data["model"], int(data["m"]), int(data["d"])
    jobs = np.array(_decode(data.get("jobs", [])), dtype=np.float64)
    if jobs.size == 0:
        jobs = np.zeros((0, d) if model == "identical" else (0, m, d))
    volume = np.array(_decode(data["volume"])) if "volume" in data else None
    max_load = float(data["max_load"]) if "max_load" in data else None
    inst = Instance(model, m, d, jobs, volume, max_load)
    spec = None
    if "targets" in data:
        norms = data.get("norms") or [1] * d
        spec = NormSpec(tuple(_decode_norm(r) for r in norms), np.array(_decode(data["targets"])))
    known = {"model", "m", "d", "jobs", "volume", "max_load", "targets", "norms", "adaptive"}
    extra = {k: v for k, v in data.items() if k not in known}
    return InstanceFile(inst, spec, data.get("adaptive"), extra, name)


def dumps(f: InstanceFile) -> str:
    return json.dumps(to_dict(f), allow_nan=False, separators=(",", ":"))


def loads(text: str, name: str = "instance") -> InstanceFile:
    return from_dict(json.loads(text), name)


def save(f: InstanceFile, path) -> None:
    Path(path).write_text(dumps(f) + "\n")


def load(path) -> InstanceFile:
    path = Path(path)
    return loads(path.read_text(), path.stem)
