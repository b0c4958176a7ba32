"""Streaming schedulers: observe one job, return an irrevocable machine."""
from __future__ import annotations

from .base import OnlineScheduler, ScheduleResult, SchedulerFinished, run_instance, run_stream
from .baselines import GreedyMakespan, RandomAssign, baseline_greedy_makespan, baseline_random
from .vsall import VsallI, vsall_bound_factor, vsall_i
from .vsany import (VsanyPotentialConfig, VsanyUGreedy, log2_potential, vsany_certificate,
                    vsany_u_greedy)
from .vsmax import (VsmaxIConfig, VsmaxIDerandomized, VsmaxIRandomized, derand_potential,
                    greedy_overflow, vsmax_alpha, vsmax_i_derandomized, vsmax_i_randomized)

ALGORITHMS = ("vsmax-i-rand", "vsmax-i-derand", "vsall-i", "vsany-u", "greedy", "random")


def make_scheduler(name: str, m: int, d: int, *, seed: int = 0, volume=None, max_load=None,
                   norm_spec=None, transform: str | None = None) -> OnlineScheduler:
    """Build a scheduler by CLI name.

    For the two VSMAX-I variants ``transform`` defaults to the full online
    pipeline when volume/max-load metadata is supplied and to the small-load
    floor only otherwise (adaptive adversaries give no a-priori metadata).
    """
    if name in ("vsmax-i-rand", "vsmax-i-derand"):
        if transform is None:
            transform = "vsmax" if volume is not None and max_load is not None else "floor"
        if name == "vsmax-i-rand":
            return VsmaxIRandomized(m, d, seed=seed, transform=transform, volume=volume, max_load=max_load)
        return VsmaxIDerandomized(m, d, transform=transform, volume=volume, max_load=max_load)
    if name == "vsall-i":
        return VsallI(m, d, volume)
    if name == "vsany-u":
        if norm_spec is None:
            raise ValueError("vsany-u needs a norm spec (targets and exponents)")
        return VsanyUGreedy(m, d, norm_spec)
    if name == "greedy":
        return GreedyMakespan(m, d)
    if name == "random":
        return RandomAssign(m, d, seed)
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


__all__ = [
    "ALGORITHMS", "GreedyMakespan", "OnlineScheduler", "RandomAssign", "ScheduleResult",
    "SchedulerFinished", "VsallI", "VsanyPotentialConfig", "VsanyUGreedy", "VsmaxIConfig",
    "VsmaxIDerandomized", "VsmaxIRandomized", "baseline_greedy_makespan", "baseline_random",
    "derand_potential", "greedy_overflow", "log2_potential", "make_scheduler", "run_instance",
    "run_stream", "vsall_bound_factor", "vsall_i", "vsany_certificate", "vsany_u_greedy",
    "vsmax_alpha", "vsmax_i_derandomized", "vsmax_i_randomized",
]
