"""Greedy potential scheduler for per-dimension L_r targets on unrelated machines.

After dividing dimension ``k`` by its target ``T_k``, the scheduler keeps
``Phi = sum_k a_k * L_k ** q_k`` with ``q_k = r_k + log2 d`` and
``a_k = (3 q_k) ** -q_k`` and sends each job where ``Phi`` grows least.
``a_k`` underflows binary64 for moderate ``q_k``, so everything is carried
as ``log2 Phi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..core import MAKESPAN, AllForbidden, Assignment, Instance, LoadMatrix, NormSpec, is_forbidden
from ..transforms import normalize_target_rows
from .base import OnlineScheduler, ScheduleResult, run_instance

_LN2 = math.log(2.0)
TIE_TOL = 1e-12


def effective_exponent(r, m: int) -> float:
    # the target norms live in [1, log m]; MAKESPAN is treated as its top end
    return max(1.0, math.log2(m)) if r is MAKESPAN else float(r)


@dataclass(frozen=True)
class VsanyPotentialConfig:
    r: np.ndarray
    q: np.ndarray
    log2_alpha: np.ndarray

    @classmethod
    def from_norms(cls, norm_spec: NormSpec, m: int) -> "VsanyPotentialConfig":
        d = norm_spec.d
        r = np.array([effective_exponent(x, m) for x in norm_spec.exponents])
        q = r + math.log2(d)
        if np.any(q < 1):
            raise ValueError("q_k must be at least 1")
        return cls(r, q, -q * np.log2(3 * q))


def log2_norms(loads: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``log2 ||loads[..., :, k]||_{r_k}`` over the machine axis (-2)."""
    top = loads.max(axis=-2)
    safe = np.where(top > 0, top, 1.0)
    scaled = (loads / safe[..., None, :]) ** r
    with np.errstate(divide="ignore"):
        out = np.log2(safe) + np.log2(scaled.sum(axis=-2)) / r
    return np.where(top > 0, out, -np.inf)


def log2_potential(loads: np.ndarray, config: VsanyPotentialConfig) -> np.ndarray:
    """``log2 sum_k a_k L_k^q_k`` with a max-shifted log-sum-exp."""
    terms = config.log2_alpha + config.q * log2_norms(loads, config.r)
    return logsumexp(terms * _LN2, axis=-1) / _LN2


class VsanyUGreedy(OnlineScheduler):
    def __init__(self, m: int, d: int, norm_spec: NormSpec, normalize: bool = True):
        super().__init__(m, d)
        if norm_spec.d != d:
            raise ValueError("norm spec dimension mismatch")
        self.norm_spec = norm_spec
        self.config = VsanyPotentialConfig.from_norms(norm_spec, m)
        self.normalize = normalize
        self.loads = LoadMatrix(m, d)
        self.raw = LoadMatrix(m, d)
        self.log_potential: list[float] = [-math.inf]

    def candidate_scores(self, p: np.ndarray) -> np.ndarray:
        """``log2 Phi`` after placing ``p`` on each machine (``nan`` if forbidden)."""
        m = self.m
        eligible = ~np.any(is_forbidden(p), axis=1)
        cand = np.broadcast_to(self.loads.loads, (m, m, self.d)).copy()
        idx = np.arange(m)
        cand[idx, idx] += np.where(eligible[:, None], p, 0.0)
        scores = log2_potential(cand, self.config)
        return np.where(eligible, scores, np.nan)

    def _step(self, load):
        load = np.broadcast_to(load, (self.m, self.d))
        p = normalize_target_rows(load, self.norm_spec.targets) if self.normalize else load
        scores = self.candidate_scores(p)
        ok = ~np.isnan(scores)
        if not ok.any():
            raise AllForbidden("no eligible machine for job")
        best = np.min(scores[ok])
        tol = TIE_TOL * max(1.0, abs(best)) if np.isfinite(best) else 0.0
        i = int(np.flatnonzero(ok & (scores <= best + tol))[0])
        self.loads.add(i, p[i])
        self.raw.add(i, load[i])
        self.log_potential.append(float(log2_potential(self.loads.loads, self.config)))
        return i

    def _result(self) -> ScheduleResult:
        return ScheduleResult(
            assignment=Assignment(self._machines),
            loads=self.loads,
            pools={"raw": self.raw},
            trace={"log2_potential": list(self.log_potential)},
            info={"q": self.config.q.tolist(), "log2_alpha": self.config.log2_alpha.tolist(),
                  "r": self.config.r.tolist()},
        )


def vsany_certificate(loads: np.ndarray, config: VsanyPotentialConfig) -> dict:
    """Final-state guarantees for normalized loads with feasible unit targets.

    ``potential_ok``: ``(2 - e^(1/2)) * Phi <= d`` (compared in log2);
    ``norm_ok``: ``L_k <= 20 q_k`` in every dimension.
    """
    d = loads.shape[1]
    lp = float(log2_potential(loads, config))
    lhs = math.log2(2.0 - math.exp(0.5)) + lp
    norms = np.exp2(log2_norms(loads, config.r))
    return {
        "log2_lhs": lhs,
        "log2_d": math.log2(d),
        "potential_ok": lhs <= math.log2(d) + 1e-12,
        "norms": norms.tolist(),
        "norm_bounds": (20 * config.q).tolist(),
        "norm_ok": bool(np.all(norms <= 20 * config.q)),
    }


def vsany_u_greedy(instance: Instance, norm_spec: NormSpec, normalize: bool = True) -> ScheduleResult:
    if instance.model != "unrelated":
        raise ValueError("VSANY-U needs an unrelated-machine instance")
    return run_instance(VsanyUGreedy(instance.m, instance.d, norm_spec, normalize), instance)
