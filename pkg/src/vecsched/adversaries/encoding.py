"""Vector-scheduling instance driven by the clique game.

With ``m`` machines (= colors = bins) the game runs on up to ``m^2``
vertices, and there is one dimension per ``sqrt(m)``-subset of those
vertices, ``d = C(m^2, sqrt m)``.  Job ``j`` is binary: 1 in dimension
``S`` iff ``v_j`` is in ``S`` and the already-issued members of ``S`` still
form a clique.  The machine the scheduler picks becomes the vertex's bin.
Dimensions are numbered by colex rank of the subset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from ..core import MAKESPAN, LoadMatrix, VecSchedError, lr_norm
from .clique_game import CliqueGame, GameTranscript, random_strings, square_root
from .cliques import max_mono_clique

DEFAULT_DIMS_CAP = 100_000


class CapExceeded(VecSchedError):
    pass


def colex_rank(subset: Sequence[int]) -> int:
    return sum(math.comb(c, i + 1) for i, c in enumerate(sorted(subset)))


def colex_unrank(rank: int, size: int) -> tuple[int, ...]:
    out = []
    for i in range(size, 0, -1):
        c = i - 1
        while math.comb(c + 1, i) <= rank:
            c += 1
        out.append(c)
        rank -= math.comb(c, i)
    return tuple(sorted(out))


def encoding_dimension(m: int) -> int:
    s = square_root(m, "m")
    return math.comb(m * m, s)


@dataclass
class EncodeResult:
    m: int
    d: int
    transcript: GameTranscript
    machines: list[int]
    job_dims: list[list[int]]
    loads: dict[int, np.ndarray]
    witness: int | None
    scheduler_info: dict = field(default_factory=dict)

    @property
    def s(self) -> int:
        return math.isqrt(self.m)

    def dim_loads(self, k: int) -> np.ndarray:
        return self.loads.get(k, np.zeros(self.m, dtype=np.int64))

    def adversary_dim_loads(self, k: int) -> np.ndarray:
        """Loads in dimension ``k`` if every job sat on its adversary color."""
        out = np.zeros(self.m, dtype=np.int64)
        for j, dims in enumerate(self.job_dims):
            if k in dims:
                out[self.transcript.colors[j]] += 1
        return out

    def dense(self) -> LoadMatrix:
        lm = LoadMatrix(self.m, self.d)
        for k, col in self.loads.items():
            lm.loads[:, k] = col
        lm.counts = np.bincount(np.asarray(self.machines, dtype=np.int64), minlength=self.m)
        return lm

    def summary(self) -> dict:
        alg = self.transcript.algorithm_clique()
        adv = self.transcript.adversary_clique()
        return {
            "m": self.m, "d": self.d, "jobs": len(self.machines),
            "witness_dimension": self.witness,
            "witness_subset": list(colex_unrank(self.witness, self.s)) if self.witness is not None else None,
            "witness_max_load": int(self.dim_loads(self.witness).max()) if self.witness is not None else 0,
            "algorithm_clique": alg, "adversary_clique": adv,
            "adversary_clique_ok": adv <= 20,
        }


class CliqueEncoding:
    def __init__(self, m: int, strings: Iterable[Sequence[int]] | None = None, seed: int = 0,
                 dims_cap: int = DEFAULT_DIMS_CAP):
        self.m = m
        self.s = square_root(m, "m")
        self.n_vertices = m * m
        self.d = math.comb(self.n_vertices, self.s)
        if self.d > dims_cap:
            raise CapExceeded(f"d = C({self.n_vertices}, {self.s}) = {self.d} exceeds cap {dims_cap}")
        self.strings = strings if strings is not None else random_strings(m, seed)

    def job_vector(self, j: int, nbrs: set[int], dead: set[tuple]) -> list[int]:
        """Dimensions where job ``j`` has load 1; updates the dead-subset set."""
        ones = []
        others = [v for v in range(self.n_vertices) if v != j]
        for rest in combinations(others, self.s - 1):
            subset = tuple(sorted(rest + (j,)))
            if subset in dead:
                continue
            if all(u in nbrs for u in subset if u < j):
                ones.append(colex_rank(subset))
            else:
                dead.add(subset)
        return ones

    def run(self, scheduler) -> EncodeResult:
        game = CliqueGame(self.m)
        source = iter(self.strings)
        dead: set[tuple] = set()
        loads: dict[int, np.ndarray] = {}
        job_dims, machines = [], []
        while not game.halted and game.n < self.n_vertices:
            try:
                string = next(source)
            except StopIteration:
                break
            j = game.n
            nbrs = game.issue(string)
            ones = self.job_vector(j, nbrs, dead)
            vec = np.zeros(self.d)
            vec[ones] = 1.0
            i = scheduler.step(vec)
            game.place(i)
            machines.append(i)
            job_dims.append(sorted(ones))
            for k in ones:
                col = loads.setdefault(k, np.zeros(self.m, dtype=np.int64))
                col[i] += 1
        info = {}
        if hasattr(scheduler, "finish"):
            res = scheduler.finish()
            info = {k: v for k, v in res.info.items() if isinstance(v, (int, float))}
        tr = game.transcript()
        witness = None
        if game.full_slot is not None:
            b, q = game.full_slot
            witness = colex_rank(game.occupants[b][q])
        return EncodeResult(self.m, self.d, tr, machines, job_dims, loads, witness, info)


def encode_vsmax_adaptive(m: int, scheduler, strings=None, seed: int = 0,
                          dims_cap: int = DEFAULT_DIMS_CAP) -> EncodeResult:
    return CliqueEncoding(m, strings, seed, dims_cap).run(scheduler)


def lr_ratio_report(result: EncodeResult, exponents: Sequence = (1, 2, 3, MAKESPAN)) -> list[dict]:
    """Norms in the witness dimension: algorithm vs the adversary coloring.

    ``C`` is the adversary's largest monochromatic clique; since at most
    ``sqrt m`` jobs are nonzero in a dimension, the adversary's norm there is
    at most ``C * m^(1/(2r))``.
    """
    if result.witness is None:
        return []
    k = result.witness
    C = result.transcript.adversary_clique()
    alg = result.dim_loads(k).astype(float)[:, None]
    adv = result.adversary_dim_loads(k).astype(float)[:, None]
    rows = []
    for r in exponents:
        a = lr_norm(alg, 0, r)
        b = lr_norm(adv, 0, r)
        bound = C if r is MAKESPAN else C * result.m ** (1.0 / (2.0 * float(r)))
        rows.append({
            "r": "inf" if r is MAKESPAN else r, "algorithm": a, "adversary": b,
            "adversary_bound": bound, "C": C,
            "ratio": a / b if b > 0 else math.inf, "ratio_vs_bound": a / bound if bound > 0 else math.inf,
        })
    return rows
