"""CSV run reports and JSON transcripts."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable

import numpy as np

from ..core import MAKESPAN, LoadMatrix

REPORT_COLUMNS = ("algorithm", "instance_id", "seed", "dimension", "norm", "value",
                  "lower_bound", "ratio", "checks")


def fmt(x) -> str:
    """Shortest round-trip text for numbers; ``inf`` for infinities and MAKESPAN."""
    if x is MAKESPAN:
        return "inf"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x.is_integer() and abs(x) < 1e16:
            return str(int(x))
        return repr(x)
    return str(x)


def ratio(value: float, lower_bound: float) -> float:
    """``value / lower_bound``; 1 when both vanish, inf when only the bound does."""
    if lower_bound > 0:
        return value / lower_bound
    return 1.0 if value == 0 else math.inf


@dataclass
class ReportRow:
    algorithm: str
    instance_id: str
    seed: int
    dimension: int
    norm: object
    value: float
    lower_bound: float
    checks: str = ""

    @property
    def ratio(self) -> float:
        return ratio(self.value, self.lower_bound)

    def cells(self) -> list[str]:
        return [self.algorithm, self.instance_id, fmt(self.seed), fmt(self.dimension), fmt(self.norm),
                fmt(self.value), fmt(self.lower_bound), fmt(self.ratio), self.checks]


@dataclass
class RunReport:
    rows: list[ReportRow]
    checks: dict[str, bool] = field(default_factory=dict)
    transcript: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def check_text(self) -> str:
        return ";".join(f"{k}:{'pass' if v else 'fail'}" for k, v in self.checks.items())

    def csv_text(self) -> str:
        buf = io.StringIO()
        write_csv(REPORT_COLUMNS, (r.cells() for r in self.rows), buf)
        return buf.getvalue()


def write_csv(header: Iterable[str], rows: Iterable[Iterable[str]], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(list(header))
    for row in rows:
        w.writerow(list(row))


def jsonable(obj):
    """Plain-JSON form of numpy/LoadMatrix/enum values; infinities become "inf"."""
    if obj is MAKESPAN:
        return "inf"
    if isinstance(obj, LoadMatrix):
        return {"loads": jsonable(obj.loads), "counts": jsonable(obj.counts)}
    if isinstance(obj, Enum):
        return obj.name
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return None
        return x
    return obj


def dump_json(obj) -> str:
    return json.dumps(jsonable(obj), allow_nan=False, indent=1, sort_keys=False)
