from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from ..core import Assignment, Instance, LoadMatrix


class SchedulerFinished(RuntimeError):
    pass


@dataclass
class ScheduleResult:
    """What a scheduler hands back once the stream ends.

    ``loads`` is the combined per-machine load in the scheduler's own
    accounting space; ``pools`` holds per-pool matrices for the two-pool
    algorithms.  ``trace`` carries per-step diagnostics (potential values,
    pass events, ...), ``info`` scalar facts such as alpha.
    """

    assignment: Assignment
    loads: LoadMatrix
    pools: dict[str, LoadMatrix] = field(default_factory=dict)
    trace: dict[str, list] = field(default_factory=dict)
    info: dict[str, Any] = field(default_factory=dict)


class OnlineScheduler(ABC):
    """Irrevocable one-job-at-a-time assignment.

    ``step`` sees a single job's load (a ``(d,)`` vector for identical
    machines, ``(m, d)`` with FORBIDDEN entries for unrelated) and returns the
    machine index.  Nothing about future jobs is available.
    """

    m: int
    d: int

    def __init__(self, m: int, d: int):
        self.m = m
        self.d = d
        self._machines: list[int] = []
        self._finished = False

    def step(self, load) -> int:
        if self._finished:
            raise SchedulerFinished("scheduler already finished")
        i = int(self._step(np.asarray(load, dtype=np.float64)))
        self._machines.append(i)
        return i

    @abstractmethod
    def _step(self, load: np.ndarray) -> int: ...

    def finish(self) -> ScheduleResult:
        self._finished = True
        return self._result()

    @abstractmethod
    def _result(self) -> ScheduleResult: ...


def run_stream(scheduler: OnlineScheduler, jobs: Iterable) -> ScheduleResult:
    for load in jobs:
        scheduler.step(load)
    return scheduler.finish()


def run_instance(scheduler: OnlineScheduler, instance: Instance) -> ScheduleResult:
    return run_stream(scheduler, instance.jobs)
