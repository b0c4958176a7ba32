"""Seeded instance generators.

Every generator draws from ``numpy.random.default_rng(seed)`` only, so the
same (kind, params, seed) gives the same file bytes.
"""
from __future__ import annotations

import math

import numpy as np

from ..adversaries.clique_game import square_root
from ..adversaries.encoding import encoding_dimension
from ..core import FORBIDDEN, MAKESPAN, Instance, NormSpec, VecSchedError, lr_norm
from .io import InstanceFile

KINDS = ("random-identical", "random-unrelated", "planted-feasible", "clique-encode", "pairing-lb")
DISTRIBUTIONS = ("uniform", "exponential", "sparse", "pareto")


class BadParams(VecSchedError, ValueError):
    pass


def _int(params: dict, key: str, default=None, lo: int = 1, hi: int | None = None) -> int:
    v = params.get(key, default)
    if v is None:
        raise BadParams(f"missing parameter {key!r}")
    try:
        v = int(v)
    except (TypeError, ValueError):
        raise BadParams(f"{key} must be an integer, got {v!r}") from None
    if v < lo or (hi is not None and v > hi):
        raise BadParams(f"{key}={v} outside [{lo}, {hi if hi is not None else 'inf'}]")
    return v


def _prob(params: dict, key: str, default: float) -> float:
    v = float(params.get(key, default))
    if not 0.0 <= v < 1.0:
        raise BadParams(f"{key} must lie in [0, 1), got {v}")
    return v


def random_loads(rng: np.random.Generator, shape, dist: str = "uniform") -> np.ndarray:
    if dist == "uniform":
        return rng.random(shape)
    if dist == "exponential":
        return rng.exponential(1.0, shape)
    if dist == "sparse":
        return rng.random(shape) * (rng.random(shape) < 0.2)
    if dist == "pareto":
        return rng.pareto(1.5, shape)
    raise BadParams(f"unknown distribution {dist!r}; choose from {DISTRIBUTIONS}")


def random_identical(rng, m: int, d: int, n: int, dist: str = "uniform") -> Instance:
    return Instance.identical(random_loads(rng, (n, d), dist), m, d)


def random_unrelated(rng, m: int, d: int, n: int, forbid: float = 0.0,
                     dist: str = "uniform") -> Instance:
    jobs = random_loads(rng, (n, m, d), dist)
    if forbid > 0 and n:
        mask = rng.random((n, m)) < forbid
        # keep at least one eligible machine per job
        keep = rng.integers(0, m, size=n)
        mask[np.arange(n), keep] = False
        jobs[mask] = FORBIDDEN
    return Instance.unrelated(jobs, m, d)


def planted_feasible(rng, m: int, d: int, n: int, norms, forbid: float = 0.0,
                     dist: str = "uniform") -> tuple[Instance, NormSpec, list[int]]:
    """Unrelated instance with a hidden assignment whose norms become the targets."""
    inst = random_unrelated(rng, m, d, n, forbid, dist)
    hidden = []
    loads = np.zeros((m, d))
    for j in range(n):
        eligible = np.flatnonzero(~np.isinf(inst.jobs[j, :, 0]))
        i = int(rng.choice(eligible))
        hidden.append(i)
        loads[i] += inst.jobs[j, i]
    targets = np.array([lr_norm(loads, k, norms[k]) for k in range(d)])
    # a dimension the hidden schedule never loads still needs a positive target
    targets[targets <= 0] = 1.0
    return inst, NormSpec(tuple(norms), targets), hidden


def _norms_param(params: dict, m: int, d: int, rng) -> tuple:
    raw = params.get("norms", "mixed")
    top = max(1.0, math.log2(m))
    if raw == "mixed":
        choices = [1, 2, top] if m >= 4 else [1, top]
        return tuple(choices[int(rng.integers(0, len(choices)))] for _ in range(d))
    if isinstance(raw, str):
        raw = [x for x in raw.split(",") if x]
    out = []
    for x in raw:
        if x in ("inf", MAKESPAN):
            out.append(MAKESPAN)
            continue
        r = float(x)
        if not 1.0 <= r <= top + 1e-12:
            raise BadParams(f"norm exponent {r} outside [1, log2 m = {top}]")
        out.append(int(r) if r.is_integer() else r)
    if len(out) == 1:
        out *= d
    if len(out) != d:
        raise BadParams(f"need {d} norm exponents, got {len(out)}")
    return tuple(out)


def generate(kind: str, params: dict | None = None, seed: int = 0) -> InstanceFile:
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    name = f"{kind}-s{seed}"
    if kind == "random-identical":
        m, d, n = _int(params, "m", 4), _int(params, "d", 4), _int(params, "n", 50, lo=0)
        dist = params.get("dist", "uniform")
        return InstanceFile(random_identical(rng, m, d, n, dist), name=name)
    if kind == "random-unrelated":
        m, d, n = _int(params, "m", 4), _int(params, "d", 2), _int(params, "n", 50, lo=0)
        inst = random_unrelated(rng, m, d, n, _prob(params, "forbid", 0.0), params.get("dist", "uniform"))
        norms = _norms_param(params, m, d, rng) if "norms" in params else (1,) * d
        return InstanceFile(inst, NormSpec(norms, np.ones(d)), name=name)
    if kind == "planted-feasible":
        m, d, n = _int(params, "m", 4), _int(params, "d", 2), _int(params, "n", 20, lo=0)
        norms = _norms_param(params, m, d, rng)
        inst, spec, hidden = planted_feasible(rng, m, d, n, norms, _prob(params, "forbid", 0.0),
                                              params.get("dist", "uniform"))
        return InstanceFile(inst, spec, extra={"hidden_assignment": hidden}, name=name)
    if kind == "clique-encode":
        m = _int(params, "m", 4, lo=4)
        try:
            square_root(m, "m")
        except ValueError as exc:
            raise BadParams(str(exc)) from None
        d = encoding_dimension(m)
        inst = Instance("identical", m, d, np.zeros((0, d)))
        return InstanceFile(inst, adaptive={"driver": "clique-encode", "params": {"m": m, "seed": seed}},
                            name=f"clique-encode-m{m}-s{seed}")
    if kind == "pairing-lb":
        h = _int(params, "h", 3, lo=1, hi=12)
        m = 2 ** h
        inst = Instance("unrelated", m, m, np.zeros((0, m, m)))
        spec = NormSpec((1,) * m, np.ones(m))
        return InstanceFile(inst, spec, adaptive={"driver": "pairing-lb", "params": {"h": h}},
                            name=f"pairing-lb-h{h}")
    raise BadParams(f"unknown kind {kind!r}; choose from {KINDS}")
