"""Halving adversary for per-dimension targets on unrelated machines.

``m = d = 2^h`` and machine ``i`` only ever loads dimension ``i``.  In each
of ``h`` phases the active machines are paired in ascending order and one
job per pair is issued that can go only to one of its two machines (unit
load on that machine's own dimension).  Machines that received a job stay
active.  A last job goes to the single survivor, which therefore ends with
load ``h + 1``; swapping every pairing decision gives load 1 everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import FORBIDDEN, MAKESPAN, Instance, LoadMatrix, NormSpec, lr_norm


@dataclass
class PairingResult:
    h: int
    instance: Instance
    pairs: list[tuple[int, ...]]
    machines: list[int]
    reverse: list[int]
    loads: LoadMatrix
    reverse_loads: LoadMatrix
    witness: int
    phases: list[list[int]] = field(default_factory=list)
    fallback_dims: list[int] = field(default_factory=list)

    def witness_norm(self, r=1) -> float:
        return lr_norm(self.loads, self.witness, r)

    def reverse_norms(self, r=1) -> list[float]:
        return [lr_norm(self.reverse_loads, k, r) for k in range(self.instance.d)]

    def summary(self) -> dict:
        return {
            "h": self.h, "m": self.instance.m, "d": self.instance.d, "jobs": len(self.machines),
            "witness_dimension": self.witness, "witness_load": float(self.loads.loads[self.witness].max()),
            "reverse_max_norm": max(self.reverse_norms()),
            "ratio": self.witness_norm() / max(self.reverse_norms()),
            "fallback_dims": self.fallback_dims,
        }


def pairing_job(m: int, machines: tuple[int, ...]) -> np.ndarray:
    """``m x m`` load: unit on each allowed machine's own dimension, FORBIDDEN elsewhere."""
    p = np.full((m, m), FORBIDDEN)
    for i in machines:
        p[i] = 0.0
        p[i, i] = 1.0
    return p


class PairingAdversary:
    def __init__(self, h: int, exponents=None):
        if h < 1:
            raise ValueError("h must be >= 1")
        self.h = h
        self.m = self.d = 2 ** h
        exps = tuple(exponents) if exponents is not None else (1,) * self.d
        self.norm_spec = NormSpec(exps, np.ones(self.d))

    def run(self, scheduler) -> PairingResult:
        m = self.m
        active = list(range(m))
        jobs, pairs, machines, reverse, phases = [], [], [], [], []
        for _ in range(self.h):
            survivors = []
            for a, b in zip(active[0::2], active[1::2]):
                p = pairing_job(m, (a, b))
                i = scheduler.step(p)
                if i not in (a, b):
                    raise AssertionError(f"scheduler placed a job on forbidden machine {i}")
                jobs.append(p)
                pairs.append((a, b))
                machines.append(i)
                reverse.append(b if i == a else a)
                survivors.append(i)
            phases.append(list(active))
            active = sorted(survivors)
        (last,) = active
        p = pairing_job(m, (last,))
        i = scheduler.step(p)
        if i != last:
            raise AssertionError(f"scheduler placed the final job on forbidden machine {i}")
        jobs.append(p)
        pairs.append((last,))
        machines.append(i)
        reverse.append(last)
        phases.append([last])
        if hasattr(scheduler, "finish"):
            scheduler.finish()

        instance = Instance.unrelated(np.array(jobs), m, self.d)
        loads, rev = LoadMatrix(m, self.d), LoadMatrix(m, self.d)
        for j, (i, ri) in enumerate(zip(machines, reverse)):
            loads.add(i, instance.jobs[j, i])
            rev.add(ri, instance.jobs[j, ri])
        log_d = math.log2(self.d)
        fallback = [k for k, r in enumerate(self.norm_spec.exponents)
                    if r is not MAKESPAN and float(r) > log_d]
        return PairingResult(self.h, instance, pairs, machines, reverse, loads, rev,
                             witness=last, phases=phases, fallback_dims=fallback)


def vsany_u_pairing_adversary(h: int, scheduler_factory=None, exponents=None) -> PairingResult:
    """Run the halving adversary; ``scheduler_factory(m, d, norm_spec)`` builds the victim."""
    from ..schedulers import VsanyUGreedy

    adv = PairingAdversary(h, exponents)
    factory = scheduler_factory or (lambda m, d, ns: VsanyUGreedy(m, d, ns))
    return adv.run(factory(adv.m, adv.d, adv.norm_spec))
