from __future__ import annotations

import numpy as np

from ..core import AllForbidden, Assignment, Instance, LoadMatrix, is_forbidden
from ..rng import Xoshiro256
from .base import OnlineScheduler, ScheduleResult, run_instance


def _per_machine(load: np.ndarray, m: int, d: int) -> np.ndarray:
    return np.broadcast_to(load, (m, d))


class GreedyMakespan(OnlineScheduler):
    """List scheduling: each job to the machine whose own max load ends up smallest."""

    def __init__(self, m: int, d: int):
        super().__init__(m, d)
        self.loads = LoadMatrix(m, d)

    def _step(self, load):
        p = _per_machine(load, self.m, self.d)
        bad = np.any(is_forbidden(p), axis=1)
        if bad.all():
            raise AllForbidden("no eligible machine for job")
        after = np.where(bad, np.inf, (self.loads.loads + np.where(bad[:, None], 0.0, p)).max(axis=1))
        i = int(np.argmin(after))
        self.loads.add(i, p[i])
        return i

    def _result(self):
        return ScheduleResult(Assignment(self._machines), self.loads)


class RandomAssign(OnlineScheduler):
    """Uniform choice among eligible machines."""

    def __init__(self, m: int, d: int, seed: int = 0):
        super().__init__(m, d)
        self.rng = Xoshiro256(seed)
        self.loads = LoadMatrix(m, d)

    def _step(self, load):
        p = _per_machine(load, self.m, self.d)
        ok = np.flatnonzero(~np.any(is_forbidden(p), axis=1))
        if ok.size == 0:
            raise AllForbidden("no eligible machine for job")
        i = int(ok[self.rng.below(ok.size)])
        self.loads.add(i, p[i])
        return i

    def _result(self):
        return ScheduleResult(Assignment(self._machines), self.loads)


def baseline_greedy_makespan(instance: Instance) -> Assignment:
    return run_instance(GreedyMakespan(instance.m, instance.d), instance).assignment


def baseline_random(instance: Instance, seed: int = 0) -> Assignment:
    return run_instance(RandomAssign(instance.m, instance.d, seed), instance).assignment
