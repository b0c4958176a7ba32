"""All-norms scheduler for identical machines.

Loads are volume-normalized and clipped at 1 before being handed to the
derandomized two-pool scheduler; the returned loads are the unclipped
normalized ones, which is what the norm guarantees are stated about.
"""
from __future__ import annotations

import numpy as np

from ..core import Instance, LoadMatrix
from ..transforms import clip_rows, volume_scale
from .base import OnlineScheduler, ScheduleResult, run_instance
from .vsmax import VsmaxIDerandomized


class VsallI(OnlineScheduler):
    def __init__(self, m: int, d: int, volume=None):
        super().__init__(m, d)
        self._scale = None if volume is None else volume_scale(volume, m)
        self.inner = VsmaxIDerandomized(m, d)
        self.true_loads = LoadMatrix(m, d)
        self.clipped_loads = LoadMatrix(m, d)
        self.large_count = np.zeros((m, d), dtype=np.int64)
        self.small_sum = np.zeros((m, d))

    def _step(self, load):
        p = load * self._scale if self._scale is not None else load
        clipped, large = clip_rows(p)
        i = self.inner.step(clipped)
        self.true_loads.add(i, p)
        self.clipped_loads.add(i, clipped)
        self.large_count[i] += large
        self.small_sum[i] += np.where(large, 0.0, p)
        return i

    def _result(self) -> ScheduleResult:
        inner = self.inner.finish()
        alpha = inner.info["alpha"]
        # realized per-(machine, dim) bound on clipped load: M1 stays below
        # 3a+1 (+1 slack), M2 below V2/m + 1
        alpha_prime = 3 * alpha + 2 + inner.info["overflow_bound"]
        return ScheduleResult(
            assignment=inner.assignment,
            loads=self.true_loads,
            pools={**inner.pools, "clipped": self.clipped_loads},
            trace={**inner.trace},
            info={**inner.info, "alpha_prime": alpha_prime,
                  "large_count": self.large_count.copy(), "small_sum": self.small_sum.copy()},
        )


def vsall_bound_factor(alpha_prime: float, r: float) -> float:
    """``2^(1+1/r) * alpha'^((r-1)/r)``."""
    return 2.0 ** (1.0 + 1.0 / r) * alpha_prime ** ((r - 1.0) / r)


def vsall_i(instance: Instance) -> ScheduleResult:
    """Schedule a raw identical instance; volume metadata is taken a priori."""
    if instance.model != "identical":
        raise ValueError("VSALL-I needs an identical-machine instance")
    inst = instance if instance.volume is not None else instance.with_metadata()
    return run_instance(VsallI(inst.m, inst.d, inst.volume), inst)
