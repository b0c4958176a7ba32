"""Named experiment grids run over a list of seeds.

Each cell is a callable ``seed -> CellResult``.  Trials for different
(cell, seed) keys are independent and may run in worker processes; results
are always aggregated in (cell order, seed) order, so every column except
``runtime_s`` is identical between reruns.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import IO, Callable, Sequence

import numpy as np

from . import acceptance
from .acceptance import CellResult
from .gen import generate
from .report import fmt, write_csv
from .run import run_file

BENCH_COLUMNS = ("suite", "cell", "seeds", "trials", "failures", "mean_ratio", "max_ratio",
                 "runtime_s", "status", "detail")

BENCH_HELP = """\
bench CSV columns (RFC 4180, CRLF line ends, one row per cell):
  suite       suite name
  cell        cell name within the suite
  seeds       number of seeds run
  trials      trials summed over seeds
  failures    failed checks summed over seeds
  mean_ratio  mean of the cell's per-trial ratios over all seeds
  max_ratio   maximum of those ratios
  runtime_s   wall time summed over seeds (the only non-deterministic column)
  status      pass | fail | error
  detail      the first seed's summary text, or the error message
"""


def _run_cell(algorithm: str, kind: str, params: dict, count: int, seed: int) -> CellResult:
    cell = CellResult(f"{algorithm}/{kind}")
    t0 = time.perf_counter()
    for x in range(count):
        f = generate(kind, params, seed * 1000 + x)
        report = run_file(algorithm, f, seed, check=True)
        cell.trials += 1
        for name in report.failures:
            cell.fail(f"{f.name}: {name}")
        finite = [r.ratio for r in report.rows if math.isfinite(r.ratio)]
        if finite:
            cell.ratios.append(max(finite))
    cell.elapsed = time.perf_counter() - t0
    if cell.ratios:
        cell.detail = f"worst-row ratio mean {np.mean(cell.ratios):.4g}"
    return cell


def _static_cell(algorithm: str, kind: str, params: dict, count: int = 10) -> Callable[[int], CellResult]:
    fn = partial(_run_cell, algorithm, kind, params, count)
    fn.cell_name = f"{algorithm}/{kind}"
    return fn


SMOKE = (
    _static_cell("vsmax-i-derand", "random-identical", {"m": 4, "d": 4, "n": 100}),
    _static_cell("vsmax-i-rand", "random-identical", {"m": 4, "d": 4, "n": 100}),
    _static_cell("vsall-i", "random-identical", {"m": 4, "d": 4, "n": 100}),
    _static_cell("greedy", "random-identical", {"m": 4, "d": 4, "n": 100}),
    _static_cell("vsany-u", "planted-feasible", {"m": 4, "d": 2, "n": 30, "forbid": 0.2}),
    _static_cell("greedy", "planted-feasible", {"m": 4, "d": 2, "n": 30, "forbid": 0.2}),
    _static_cell("vsany-u", "pairing-lb", {"h": 4}, count=1),
    _static_cell("random", "pairing-lb", {"h": 4}, count=1),
)

SUITES: dict[str, Sequence[Callable[[int], CellResult]]] = {
    "acceptance": acceptance.CRITERIA,
    "smoke": SMOKE,
}


def _trial(suite: str, index: int, seed: int) -> CellResult:
    fn = SUITES[suite][index]
    try:
        return fn(seed)
    except Exception as exc:  # a crashing cell is reported, not fatal
        cell = CellResult(getattr(fn, "cell_name", str(index)))
        cell.fail(f"{type(exc).__name__}: {exc}")
        cell.detail = f"error: {type(exc).__name__}: {exc}"
        cell.notes.insert(0, "error")
        return cell


def run_suite(suite: str, seeds: Sequence[int], jobs: int = 1) -> list[list[CellResult]]:
    """Per cell, the results for each seed in the given order."""
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    keys = [(i, s) for i in range(len(SUITES[suite])) for s in seeds]
    if jobs > 1 and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial, [suite] * len(keys), *zip(*keys)))
    else:
        results = [_trial(suite, i, s) for i, s in keys]
    out = [[] for _ in SUITES[suite]]
    for (i, _), res in zip(keys, results):
        out[i].append(res)
    return out if seeds else []


def aggregate(suite: str, per_cell: list[list[CellResult]]) -> list[list[str]]:
    rows = []
    for results in per_cell:
        ratios = [r for res in results for r in res.ratios]
        errored = any(res.notes[:1] == ["error"] for res in results)
        passed = all(res.passed for res in results)
        status = "error" if errored else ("pass" if passed else "fail")
        rows.append([
            suite, results[0].name, fmt(len(results)), fmt(sum(r.trials for r in results)),
            fmt(sum(r.failures for r in results)),
            fmt(float(np.mean(ratios))) if ratios else "", fmt(max(ratios)) if ratios else "",
            f"{sum(r.elapsed for r in results):.3f}", status, results[0].detail,
        ])
    return rows


def bench(suite: str, seeds: Sequence[int], out: IO[str], jobs: int = 1) -> tuple[bool, list[list[CellResult]]]:
    per_cell = run_suite(suite, seeds, jobs)
    write_csv(BENCH_COLUMNS, aggregate(suite, per_cell), out)
    ok = all(res.passed for results in per_cell for res in results)
    return ok, per_cell
