"""Two-pool schedulers for makespan on identical machines.

Both variants keep a primary pool M1 and an overflow pool M2 of ``m``
machines each; machine ``i`` of M1 is paired with machine ``i`` of M2 and the
real load of machine ``i`` is the sum of the pair.  Every job is charged to
its M1 machine's *virtual* load, which drives the pass rule and the
potential.  A job whose placement pushes some virtual load to the pass
threshold is handed to M2 and packed greedily there; the remaining jobs form
the *actual* M1 load.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Assignment, Instance, LoadMatrix, Pool
from ..rng import Xoshiro256
from ..transforms import floor_rows, vsmax_scale
from .base import OnlineScheduler, ScheduleResult, run_instance


def vsmax_alpha(d: int) -> float:
    """``10 log d / log log d`` (base 2); fixed at 10 for d < 4."""
    if d < 4:
        return 10.0
    return 10.0 * math.log2(d) / math.log2(math.log2(d))


@dataclass(frozen=True)
class VsmaxIConfig:
    alpha: float
    pass_threshold: float
    seed: int | None = None

    @classmethod
    def randomized(cls, d: int, seed: int = 0) -> "VsmaxIConfig":
        a = vsmax_alpha(d)
        return cls(a, 2 * a + 1, seed)

    @classmethod
    def derandomized(cls, d: int) -> "VsmaxIConfig":
        a = vsmax_alpha(d)
        return cls(a, 3 * a + 1)


def greedy_overflow(load: np.ndarray, overflow: np.ndarray) -> int:
    """M2 machine minimizing the post-assignment makespan; lowest index on ties."""
    overflow = np.asarray(overflow, dtype=np.float64)
    m = overflow.shape[0]
    if m == 1:
        return 0
    row_max = overflow.max(axis=1)
    new_row = (overflow + load).max(axis=1)
    order = np.argsort(-row_max, kind="stable")
    top, second = row_max[order[0]], row_max[order[1]]
    others = np.full(m, top)
    others[order[0]] = second
    return int(np.argmin(np.maximum(others, new_row)))


def derand_potential(virtual: np.ndarray, prefix_volume: np.ndarray, alpha: float) -> float:
    """``sum_{i,k} alpha ** (L_ik - alpha/m * prefix_k)`` evaluated via exp2."""
    virtual = np.asarray(virtual, dtype=np.float64)
    m = virtual.shape[0]
    expo = virtual - (alpha / m) * np.asarray(prefix_volume, dtype=np.float64)
    return float(np.exp2(expo * math.log2(alpha)).sum())


class _TwoPool(OnlineScheduler):
    def __init__(self, m: int, d: int, config: VsmaxIConfig, *, transform: str | None = None,
                 volume=None, max_load: float | None = None):
        super().__init__(m, d)
        self.config = config
        self.alpha = config.alpha
        self.threshold = config.pass_threshold
        self._scale = None
        if transform == "vsmax":
            if volume is None or max_load is None:
                raise ValueError("the vsmax transform needs volume and max_load a priori")
            self._scale = vsmax_scale(volume, max_load, m)
        elif transform not in (None, "floor"):
            raise ValueError(f"unknown transform {transform!r}")
        self.transform = transform
        self.virtual = np.zeros((m, d))
        self.primary = LoadMatrix(m, d)
        self.overflow = LoadMatrix(m, d)
        self.prefix_volume = np.zeros(d)
        self.overflow_volume = 0.0
        self._pools: list[int] = []
        self._first: list[int] = []
        self.trace: dict[str, list] = {"passed": []}

    def prepare(self, load: np.ndarray) -> np.ndarray:
        if self._scale is not None:
            load = load * self._scale
        if self.transform is not None:
            load = floor_rows(load)
        return load

    def _choose(self, p: np.ndarray) -> int:
        raise NotImplementedError

    def _after(self, p: np.ndarray) -> None:
        pass

    def _step(self, load: np.ndarray) -> int:
        p = self.prepare(load)
        i = self._choose(p)
        self.virtual[i] += p
        self.prefix_volume += p
        self._first.append(i)
        self._after(p)
        if np.any(self.virtual[i] >= self.threshold):
            i2 = greedy_overflow(p, self.overflow.loads)
            self.overflow.add(i2, p)
            self.overflow_volume += float(p.sum())
            self._pools.append(Pool.OVERFLOW.value)
            self.trace["passed"].append(len(self._first) - 1)
            return i2
        self.primary.add(i, p)
        self._pools.append(Pool.PRIMARY.value)
        return i

    def _result(self) -> ScheduleResult:
        virtual = LoadMatrix(self.m, self.d, self.virtual.copy(),
                             np.bincount(np.asarray(self._first, dtype=np.int64), minlength=self.m))
        return ScheduleResult(
            assignment=Assignment(self._machines, self._pools),
            loads=self.primary + self.overflow,
            pools={"primary": self.primary, "overflow": self.overflow, "virtual": virtual},
            trace={**self.trace, "first_choice": list(self._first)},
            info={
                "alpha": self.alpha,
                "threshold": self.threshold,
                "overflow_volume": self.overflow_volume,
                "overflow_bound": self.overflow_volume / self.m + 1.0,
                "passed": len(self.trace["passed"]),
            },
        )


class VsmaxIRandomized(_TwoPool):
    """Uniform random M1 placement with pass threshold ``2 alpha + 1``."""

    def __init__(self, m: int, d: int, seed: int = 0, **kw):
        super().__init__(m, d, VsmaxIConfig.randomized(d, seed), **kw)
        self.rng = Xoshiro256(seed)

    def _choose(self, p):
        return self.rng.below(self.m)


class VsmaxIDerandomized(_TwoPool):
    """Potential-guided M1 placement with pass threshold ``3 alpha + 1``.

    The potential is ``sum_{i,k} alpha ** (L_ik - alpha/m * V_k(j))`` where
    ``V_k(j)`` is the volume seen so far; each job goes to the machine that
    leaves it smallest.  ``trace["potential"]`` starts with the empty-state
    value ``m * d``.
    """

    def __init__(self, m: int, d: int, **kw):
        super().__init__(m, d, VsmaxIConfig.derandomized(d), **kw)
        self._lg = math.log2(self.alpha)
        self.trace["potential"] = [float(m * d)]

    def _choose(self, p):
        shift = (self.alpha / self.m) * (self.prefix_volume + p)
        base = np.exp2((self.virtual - shift) * self._lg)
        gain = np.exp2(p * self._lg) - 1.0
        return int(np.argmin(base @ gain))

    def _after(self, p):
        self.trace["potential"].append(derand_potential(self.virtual, self.prefix_volume, self.alpha))


def vsmax_i_randomized(instance: Instance, seed: int = 0, transform: str | None = None) -> ScheduleResult:
    """Run the randomized two-pool scheduler.

    With ``transform=None`` the instance is taken as already transformed;
    ``"vsmax"`` applies the normalization/cap/floor online from the metadata.
    """
    return run_instance(_build(VsmaxIRandomized, instance, transform, seed=seed), instance)


def vsmax_i_derandomized(instance: Instance, transform: str | None = None) -> ScheduleResult:
    return run_instance(_build(VsmaxIDerandomized, instance, transform), instance)


def _build(cls, instance: Instance, transform, **kw):
    if instance.model != "identical":
        raise ValueError("VSMAX-I schedulers need an identical-machine instance")
    if transform == "vsmax":
        inst = instance.with_metadata() if instance.volume is None else instance
        kw.update(volume=inst.volume, max_load=inst.max_load)
    return cls(instance.m, instance.d, transform=transform, **kw)
