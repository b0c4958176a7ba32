"""Domain types and load/norm metrics shared by every module.

Loads are stored as float64 numpy arrays.  Identical-machine jobs are rows of
an ``(n, d)`` array; unrelated-machine jobs are ``(n, m, d)`` arrays in which
:data:`FORBIDDEN` (``+inf``) marks a machine the job may never be placed on.
Indices are 0-based throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np

#: Marker for a machine/dimension entry a job can never be assigned to.
FORBIDDEN = math.inf


class Makespan:
    """The L-infinity exponent.  Use the :data:`MAKESPAN` singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MAKESPAN"

    def __reduce__(self):
        return (Makespan, ())


MAKESPAN = Makespan()

Exponent = Union[float, int, Makespan]


class VecSchedError(Exception):
    """Base class for errors raised by this package."""


class AssignedForbidden(VecSchedError):
    pass


class AllForbidden(VecSchedError):
    pass


class InvalidExponent(VecSchedError, ValueError):
    pass


class Pool(Enum):
    NONE = 0
    PRIMARY = 1   # M1
    OVERFLOW = 2  # M2


def is_forbidden(x) -> np.ndarray:
    return np.isposinf(x)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    """An ordered job list plus the a-priori metadata the algorithms may use.

    ``volume`` and ``max_load`` are only meaningful for the identical model and,
    when given, must match what :meth:`recompute_volume` /
    :meth:`recompute_max_load` produce bit for bit.
    """

    model: str
    m: int
    d: int
    jobs: np.ndarray
    volume: np.ndarray | None = None
    max_load: float | None = None

    def __post_init__(self):
        if self.model not in ("identical", "unrelated"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.m < 1 or self.d < 1:
            raise ValueError("need m >= 1 and d >= 1")
        jobs = np.asarray(self.jobs, dtype=np.float64)
        if self.model == "identical":
            jobs = jobs.reshape(-1, self.d) if jobs.size == 0 else jobs
            if jobs.ndim != 2 or jobs.shape[1] != self.d:
                raise ValueError(f"identical jobs must have shape (n, {self.d})")
            if not np.all(np.isfinite(jobs)):
                raise ValueError("identical loads must be finite")
            if np.any(jobs < 0):
                raise ValueError("loads must be nonnegative")
        else:
            jobs = jobs.reshape(-1, self.m, self.d) if jobs.size == 0 else jobs
            if jobs.ndim != 3 or jobs.shape[1:] != (self.m, self.d):
                raise ValueError(f"unrelated jobs must have shape (n, {self.m}, {self.d})")
            if np.any(np.isnan(jobs)) or np.any(np.isneginf(jobs)) or np.any(jobs < 0):
                raise ValueError("loads must be nonnegative or FORBIDDEN")
            eligible = ~np.any(is_forbidden(jobs), axis=2)
            if jobs.shape[0] and not np.all(eligible.any(axis=1)):
                bad = int(np.flatnonzero(~eligible.any(axis=1))[0])
                raise AllForbidden(f"job {bad} has no eligible machine")
        object.__setattr__(self, "jobs", _frozen(jobs))
        if self.volume is not None:
            if self.model != "identical":
                raise ValueError("volume metadata only applies to identical instances")
            vol = _frozen(self.volume)
            if not np.array_equal(vol, self.recompute_volume()):
                raise ValueError("volume does not match the job loads")
            object.__setattr__(self, "volume", vol)
        if self.max_load is not None:
            if float(self.max_load) != self.recompute_max_load():
                raise ValueError("max_load does not match the job loads")
            object.__setattr__(self, "max_load", float(self.max_load))

    @classmethod
    def identical(cls, jobs, m: int, d: int | None = None, metadata: bool = True) -> "Instance":
        jobs = np.asarray(jobs, dtype=np.float64)
        if d is None:
            d = jobs.shape[1]
        jobs = jobs.reshape(-1, d)
        inst = cls("identical", m, d, jobs)
        if metadata:
            inst = inst.with_metadata()
        return inst

    @classmethod
    def unrelated(cls, jobs, m: int | None = None, d: int | None = None) -> "Instance":
        jobs = np.asarray(jobs, dtype=np.float64)
        if m is None or d is None:
            m, d = jobs.shape[1], jobs.shape[2]
        return cls("unrelated", m, d, jobs.reshape(-1, m, d))

    @property
    def n(self) -> int:
        return int(self.jobs.shape[0])

    def recompute_volume(self) -> np.ndarray:
        return self.jobs.sum(axis=0) if self.n else np.zeros(self.d)

    def recompute_max_load(self) -> float:
        if self.n == 0:
            return 0.0
        finite = self.jobs[np.isfinite(self.jobs)]
        return float(finite.max()) if finite.size else 0.0

    def with_metadata(self) -> "Instance":
        vol = self.recompute_volume() if self.model == "identical" else None
        return Instance(self.model, self.m, self.d, self.jobs, vol, self.recompute_max_load())

    def with_jobs(self, jobs, metadata: bool = True) -> "Instance":
        inst = Instance(self.model, self.m, self.d, jobs)
        return inst.with_metadata() if metadata else inst

    def job_on(self, j: int, i: int) -> np.ndarray:
        """Load vector of job ``j`` if placed on machine ``i``."""
        return self.jobs[j] if self.model == "identical" else self.jobs[j, i]


@dataclass
class LoadMatrix:
    """Running ``m x d`` machine loads.  Single writer; entries only grow."""

    m: int
    d: int
    loads: np.ndarray = field(default=None)
    counts: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.loads is None:
            self.loads = np.zeros((self.m, self.d))
        if self.counts is None:
            self.counts = np.zeros(self.m, dtype=np.int64)

    def add(self, i: int, load) -> None:
        load = np.asarray(load, dtype=np.float64)
        if np.any(is_forbidden(load)):
            raise AssignedForbidden(f"machine {i} is forbidden for this job")
        self.loads[i] += load
        self.counts[i] += 1

    def copy(self) -> "LoadMatrix":
        return LoadMatrix(self.m, self.d, self.loads.copy(), self.counts.copy())

    def __add__(self, other: "LoadMatrix") -> "LoadMatrix":
        return LoadMatrix(self.m, self.d, self.loads + other.loads, self.counts + other.counts)

    def makespan(self) -> float:
        return float(self.loads.max()) if self.loads.size else 0.0

    def norm(self, k: int, r: Exponent) -> float:
        return lr_norm(self, k, r)


@dataclass(frozen=True, eq=False)
class NormSpec:
    """Per-dimension norm exponents ``r_k`` and targets ``T_k``."""

    exponents: tuple
    targets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(self.exponents))
        t = _frozen(self.targets)
        if len(self.exponents) != t.shape[0]:
            raise ValueError("exponents and targets must have the same length")
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise ValueError("targets must be finite and nonnegative")
        object.__setattr__(self, "targets", t)

    @property
    def d(self) -> int:
        return len(self.exponents)

    def validate(self, m: int) -> None:
        hi = max(1.0, math.log2(m))
        for k, r in enumerate(self.exponents):
            if r is MAKESPAN:
                continue
            if not (1.0 <= float(r) <= hi + 1e-12):
                raise InvalidExponent(f"r_{k} = {r} outside [1, log2 m = {hi:g}]")


@dataclass
class Assignment:
    machines: np.ndarray
    pools: np.ndarray | None = None

    def __post_init__(self):
        self.machines = np.asarray(self.machines, dtype=np.int64)
        if self.pools is not None:
            self.pools = np.asarray(self.pools, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.machines)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        same_pools = (self.pools is None and other.pools is None) or (
            self.pools is not None and other.pools is not None
            and np.array_equal(self.pools, other.pools))
        return np.array_equal(self.machines, other.machines) and same_pools


def _check_exponent(r: Exponent) -> None:
    if r is MAKESPAN:
        return
    if not (isinstance(r, (int, float, np.floating, np.integer)) and r >= 1):
        raise InvalidExponent(f"norm exponent must be >= 1 or MAKESPAN, got {r!r}")


def load_matrix(instance: Instance, assignment: Assignment | Sequence[int]) -> LoadMatrix:
    """Loads produced by assigning a prefix of ``instance.jobs``."""
    machines = assignment.machines if isinstance(assignment, Assignment) else np.asarray(assignment)
    if len(machines) > instance.n:
        raise ValueError("assignment is longer than the job list")
    lm = LoadMatrix(instance.m, instance.d)
    for j, i in enumerate(machines):
        i = int(i)
        if not 0 <= i < instance.m:
            raise IndexError(f"machine index {i} out of range")
        lm.add(i, instance.job_on(j, i))
    return lm


def lr_norm(load: LoadMatrix | np.ndarray, k: int, r: Exponent) -> float:
    """``(sum_i L_i(k)^r)^(1/r)``, or ``max_i L_i(k)`` for MAKESPAN."""
    _check_exponent(r)
    loads = load.loads if isinstance(load, LoadMatrix) else np.asarray(load)
    col = loads[:, k]
    if col.size == 0:
        return 0.0
    if r is MAKESPAN:
        return float(col.max())
    if r == 1:
        return float(col.sum())
    top = col.max()
    if top == 0:
        return 0.0
    # scale by the max so large r does not overflow
    return float(top * np.sum((col / top) ** float(r)) ** (1.0 / float(r)))


def all_norms_report(load: LoadMatrix | np.ndarray, exponents: Iterable[Exponent]) -> list[list[float]]:
    """Rows per dimension, columns in the order ``exponents`` was given."""
    exponents = list(exponents)
    if not exponents:
        raise ValueError("exponent set must be nonempty")
    loads = load.loads if isinstance(load, LoadMatrix) else np.asarray(load)
    return [[lr_norm(loads, k, r) for r in exponents] for k in range(loads.shape[1])]
