"""Online instance transformations and the load properties they guarantee.

Every transformation has a row-level form (``*_rows``) that works on an
``(n, d)`` array, or a single ``(d,)`` job, so the streaming schedulers can
apply it one job at a time from the a-priori volume and max-load metadata.
The instance-level wrappers are pure and return new :class:`Instance` objects.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FORBIDDEN, AllForbidden, Instance, NormSpec, is_forbidden


def _require_identical(instance: Instance) -> None:
    if instance.model != "identical":
        raise ValueError("transformation is defined for identical machines only")


def _volume_of(instance: Instance) -> np.ndarray:
    return instance.volume if instance.volume is not None else instance.recompute_volume()


def _max_load_of(instance: Instance) -> float:
    return instance.max_load if instance.max_load is not None else instance.recompute_max_load()


# --- row-level forms -------------------------------------------------------

def volume_scale(volume: np.ndarray, m: int) -> np.ndarray:
    """Per-dimension factor ``m / V_k``; zero-volume dimensions get 1."""
    volume = np.asarray(volume, dtype=np.float64)
    safe = np.where(volume > 0, volume, 1.0)
    return np.where(volume > 0, m / safe, 1.0)


def vsmax_scale(volume: np.ndarray, max_load: float, m: int) -> np.ndarray:
    """Combined factor of the volume normalization and the max-job cap.

    Dimensions with ``T >= V_k / m`` are divided by ``T``; the others by
    ``V_k / m``.  With ``T = 0`` the instance is all zeros and nothing moves.
    """
    volume = np.asarray(volume, dtype=np.float64)
    scale = volume_scale(volume, m)
    if max_load > 0:
        capped = max_load >= volume / m
        scale = np.where(capped, 1.0 / max_load, scale)
    return scale


def floor_rows(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    d = p.shape[-1]
    floor = p.max(axis=-1, keepdims=True) / d
    return np.maximum(p, floor)


def clip_rows(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    return np.minimum(p, 1.0), p > 1.0


# --- instance-level forms --------------------------------------------------

def normalize_volume(instance: Instance) -> Instance:
    """Divide every dimension by ``V_k / m`` so each column sums to ``m``."""
    _require_identical(instance)
    scale = volume_scale(_volume_of(instance), instance.m)
    return instance.with_jobs(instance.jobs * scale)


def cap_by_max_job(normalized: Instance, volume: np.ndarray, max_load: float) -> Instance:
    """Re-normalize by the largest job ``T`` where ``T >= V_k / m``.

    ``normalized`` is the output of :func:`normalize_volume`; ``volume`` and
    ``max_load`` are the metadata of the instance before normalization.
    """
    _require_identical(normalized)
    volume = np.asarray(volume, dtype=np.float64)
    if max_load <= 0:
        return normalized
    m = normalized.m
    capped = max_load >= volume / m
    factor = np.where(capped, volume / (m * max_load), 1.0)
    return normalized.with_jobs(normalized.jobs * factor)


def floor_small_loads(instance: Instance) -> Instance:
    """Raise each load to at least ``1/d`` of the job's largest load."""
    _require_identical(instance)
    return instance.with_jobs(floor_rows(instance.jobs))


def clip_to_one(instance: Instance) -> tuple[Instance, np.ndarray]:
    """Clip loads at 1; the returned mask flags the (job, dim) pairs that were large."""
    _require_identical(instance)
    clipped, large = clip_rows(instance.jobs)
    return instance.with_jobs(clipped), large


def vsmax_pipeline(instance: Instance) -> Instance:
    """Volume normalization, max-job cap and small-load floor in one pass."""
    _require_identical(instance)
    scale = vsmax_scale(_volume_of(instance), _max_load_of(instance), instance.m)
    return instance.with_jobs(floor_rows(instance.jobs * scale))


def normalize_targets(instance: Instance, norm_spec: NormSpec) -> Instance:
    """Divide dimension ``k`` by ``T_k``.

    Where ``T_k = 0`` any placement adding positive load in ``k`` becomes
    FORBIDDEN (zero loads stay as they are).
    """
    if instance.model != "unrelated":
        raise ValueError("target normalization is defined for unrelated machines")
    jobs = normalize_target_rows(instance.jobs, norm_spec.targets)
    eligible = ~np.any(is_forbidden(jobs), axis=2)
    if jobs.shape[0] and not np.all(eligible.any(axis=1)):
        bad = int(np.flatnonzero(~eligible.any(axis=1))[0])
        raise AllForbidden(f"job {bad} has no eligible machine after target normalization")
    return instance.with_jobs(jobs, metadata=False)


def normalize_target_rows(p: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Row form of :func:`normalize_targets` for ``(..., m, d)`` arrays."""
    p = np.array(p, dtype=np.float64, copy=True)
    targets = np.asarray(targets, dtype=np.float64)
    zero = targets == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(zero, p, p / np.where(zero, 1.0, targets))
    # a machine row with positive load in a zero-target dimension is discarded
    bad_rows = np.any((p > 0) & zero, axis=-1, keepdims=True)
    out = np.where(bad_rows, FORBIDDEN, out)
    return out


# --- property checks -------------------------------------------------------

@dataclass
class PropertyResult:
    name: str
    passed: bool
    witness: tuple | None = None


@dataclass
class PropertyReport:
    which: str
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> PropertyResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def check_properties(instance: Instance, which: str = "vsmax", tol: float = 1e-9) -> PropertyReport:
    """Check the post-transformation load properties.

    ``which="vsmax"``: column sums <= 2m, loads in [0, 1], each load within
    ``[max/d, max]`` of its job.  ``which="vsall"``: column sums <= m, loads in
    [0, 1].  ``tol`` is a relative slack for floating point.
    """
    _require_identical(instance)
    if which not in ("vsmax", "vsall"):
        raise ValueError("which must be 'vsmax' or 'vsall'")
    p, m, d = instance.jobs, instance.m, instance.d
    report = PropertyReport(which)
    col_cap = 2 * m if which == "vsmax" else m
    sums = p.sum(axis=0) if p.shape[0] else np.zeros(d)
    over = np.flatnonzero(sums > col_cap * (1 + tol))
    report.results.append(PropertyResult(
        "column_sum", over.size == 0, (int(over[0]),) if over.size else None))
    bad = np.argwhere((p < 0) | (p > 1 + tol))
    report.results.append(PropertyResult(
        "unit_range", bad.size == 0, tuple(int(x) for x in bad[0]) if bad.size else None))
    if which == "vsmax":
        top = p.max(axis=1, keepdims=True) if p.shape[0] else np.zeros((0, 1))
        bad = np.argwhere((p < top / d * (1 - tol)) | (p > top))
        report.results.append(PropertyResult(
            "within_max_over_d", bad.size == 0,
            tuple(int(x) for x in bad[0]) if bad.size else None))
    return report
