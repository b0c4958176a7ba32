"""The bins-and-slots online coloring game.

The online algorithm puts each vertex in one of ``t`` bins; the adversary
splits every bin into ``s = sqrt(t)`` slots and the ``t`` colors into ``s``
color sets of ``s`` colors, set ``q`` being colors ``q*s .. q*s + s - 1``.
A new vertex comes with a length-``t`` string over ``[s]`` and is joined to
every occupant of slot ``string[b]`` of each bin ``b``.  Once the algorithm
picks bin ``b`` the vertex lands in slot ``string[b]`` and takes the lowest
color of that slot's set not yet used inside that (bin, slot).  The game
stops as soon as some slot holds ``s`` vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from ..core import VecSchedError
from ..rng import Xoshiro256
from .cliques import max_mono_clique


class ColorExhausted(VecSchedError):
    pass


class RetriesExhausted(VecSchedError):
    pass


def square_root(t: int, what: str = "t") -> int:
    s = math.isqrt(t)
    if t < 4 or s * s != t:
        raise ValueError(f"{what} must be a perfect square >= 4, got {t}")
    return s


class CliqueGame:
    def __init__(self, t: int):
        self.t = t
        self.s = square_root(t)
        self.occupants = [[[] for _ in range(self.s)] for _ in range(t)]
        self.adjacency: list[set[int]] = []
        self.strings: list[tuple[int, ...]] = []
        self.bins: list[int] = []
        self.slots: list[int] = []
        self.colors: list[int] = []
        self.full_slot: tuple[int, int] | None = None
        self._pending = False

    @property
    def n(self) -> int:
        return len(self.bins)

    @property
    def halted(self) -> bool:
        return self.full_slot is not None

    def issue(self, string: Sequence[int]) -> set[int]:
        """Add a vertex adjacent to slot ``string[b]`` of every bin ``b``."""
        if self.halted:
            raise RuntimeError("game has halted")
        if self._pending:
            raise RuntimeError("previous vertex has not been placed")
        string = tuple(int(x) for x in string)
        if len(string) != self.t or any(not 0 <= x < self.s for x in string):
            raise ValueError("adjacency string must have length t over [sqrt t]")
        v = len(self.adjacency)
        nbrs = set()
        for b, q in enumerate(string):
            nbrs.update(self.occupants[b][q])
        self.adjacency.append(nbrs)
        for u in nbrs:
            self.adjacency[u].add(v)
        self.strings.append(string)
        self._pending = True
        return nbrs

    def place(self, b: int) -> tuple[int, int]:
        """Put the pending vertex in bin ``b``; returns (slot, adversary color)."""
        if not self._pending:
            raise RuntimeError("no vertex pending")
        if not 0 <= b < self.t:
            raise ValueError(f"bin {b} out of range")
        v = len(self.bins)
        q = self.strings[v][b]
        cell = self.occupants[b][q]
        used = {self.colors[u] for u in cell}
        free = [q * self.s + c for c in range(self.s) if q * self.s + c not in used]
        if not free:
            raise ColorExhausted(f"slot {q} of bin {b} has no unused color")
        cell.append(v)
        self.bins.append(b)
        self.slots.append(q)
        self.colors.append(free[0])
        self._pending = False
        if len(cell) == self.s:
            self.full_slot = (b, q)
        return q, free[0]

    def transcript(self) -> "GameTranscript":
        return GameTranscript(
            t=self.t, strings=[list(s) for s in self.strings], bins=list(self.bins),
            slots=list(self.slots), colors=list(self.colors),
            adjacency=[sorted(a) for a in self.adjacency[: self.n]],
            full_slot=list(self.full_slot) if self.full_slot else None)


@dataclass
class GameTranscript:
    t: int
    strings: list[list[int]]
    bins: list[int]
    slots: list[int]
    colors: list[int]
    adjacency: list[list[int]]
    full_slot: list[int] | None
    summary: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.bins)

    @property
    def s(self) -> int:
        return math.isqrt(self.t)

    def algorithm_clique(self, **kw):
        return max_mono_clique(self.adjacency, self.bins, **kw)

    def adversary_clique(self, **kw):
        return max_mono_clique(self.adjacency, self.colors, slots=self.slots, bins=self.bins, **kw)

    def to_dict(self) -> dict:
        return {
            "t": self.t, "strings": self.strings, "bins": self.bins, "slots": self.slots,
            "colors": self.colors, "adjacency": self.adjacency, "full_slot": self.full_slot,
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameTranscript":
        return cls(**data)


# --- strategies ------------------------------------------------------------

Strategy = Callable[[CliqueGame, Sequence[int]], int]


def greedy_strategy(game: CliqueGame, string: Sequence[int]) -> int:
    """Bin whose target slot is emptiest, i.e. the smallest clique grown."""
    sizes = [len(game.occupants[b][string[b]]) for b in range(game.t)]
    return int(np.argmin(sizes))


def round_robin_strategy(game: CliqueGame, string: Sequence[int]) -> int:
    return game.n % game.t


def fixed_strategy(bin_index: int = 0) -> Strategy:
    def choose(game, string):
        return bin_index
    return choose


def random_strategy(seed: int = 0) -> Strategy:
    rng = Xoshiro256(seed)

    def choose(game, string):
        return rng.below(game.t)
    return choose


def builtin_strategy(name: str, seed: int = 0) -> Strategy:
    if name in ("greedy", "bin-greedy"):
        return greedy_strategy
    if name == "round-robin":
        return round_robin_strategy
    if name == "random":
        return random_strategy(seed)
    if name.startswith("fixed"):
        _, _, b = name.partition(":")
        return fixed_strategy(int(b or 0))
    raise ValueError(f"unknown strategy {name!r}")


BUILTIN_STRATEGIES = ("greedy", "random", "round-robin")


# --- string sources --------------------------------------------------------

def random_strings(t: int, seed: int, count: int | None = None) -> Iterator[tuple[int, ...]]:
    """Uniform strings of length ``t`` over ``[sqrt t]`` from a seeded numpy stream."""
    s = square_root(t)
    rng = np.random.default_rng(seed)
    emitted = 0
    while count is None or emitted < count:
        yield tuple(int(x) for x in rng.integers(0, s, size=t))
        emitted += 1


def sample_strings(t: int, seed, count: int) -> np.ndarray:
    s = square_root(t)
    return np.random.default_rng(seed).integers(0, s, size=(count, t))


def clique_game_play(t: int, strategy: Strategy, strings: Iterable[Sequence[int]],
                     max_vertices: int | None = None) -> GameTranscript:
    """Play until a slot fills, ``t^2`` vertices are issued or strings run out."""
    game = CliqueGame(t)
    limit = t * t if max_vertices is None else max_vertices
    source = iter(strings)
    while not game.halted and game.n < limit:
        try:
            string = next(source)
        except StopIteration:
            break
        game.issue(string)
        game.place(int(strategy(game, string)))
    return game.transcript()


# --- checks ----------------------------------------------------------------

def slot_cliques_ok(tr: GameTranscript) -> bool:
    """Every (bin, slot) group is a clique with distinct colors from its set."""
    adj = [set(a) for a in tr.adjacency]
    groups: dict = {}
    for v, (b, q) in enumerate(zip(tr.bins, tr.slots)):
        groups.setdefault((b, q), []).append(v)
    s = tr.s
    for (b, q), members in groups.items():
        cols = [tr.colors[v] for v in members]
        if len(set(cols)) != len(cols) or any(c // s != q for c in cols):
            return False
        if any(v not in adj[u] for u, v in combinations(members, 2)):
            return False
    return True


def clique_string_shape_ok(tr: GameTranscript, clique: Sequence[int]) -> bool:
    """Each later member's string points at the earlier members' bins with the color's set."""
    clique = sorted(clique)
    if not clique:
        return True
    ell = tr.colors[clique[0]] // tr.s
    for jj, vj in enumerate(clique):
        for vi in clique[:jj]:
            if tr.strings[vj][tr.bins[vi]] != ell:
                return False
    return True


def p_s_q_counts(strings: np.ndarray, samples: int, seed, size: int = 10) -> np.ndarray:
    """``P(S, q)`` for random (S, q): number of strings equal to ``q`` on all of ``S``."""
    strings = np.asarray(strings)
    n, t = strings.shape
    s = math.isqrt(t)
    rng = np.random.default_rng(seed)
    subsets = np.argsort(rng.random((samples, t)), axis=1)[:, :size]
    targets = rng.integers(0, s, size=samples)
    out = np.empty(samples, dtype=np.int64)
    step = max(1, 4_000_000 // max(1, n * size))
    for lo in range(0, samples, step):
        hi = min(samples, lo + step)
        picked = strings[:, subsets[lo:hi]]
        out[lo:hi] = np.all(picked == targets[None, lo:hi, None], axis=2).sum(axis=0)
    return out


@dataclass
class GoodSequenceCertificate:
    t: int
    seed: int
    retries: int
    max_adversary_clique: int
    per_strategy: dict
    shape_ok: bool
    pq_checked: int
    pq_max: int | None
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def sample_good_sequence(t: int, seed: int, max_retries: int = 3,
                         strategies: Sequence[str] = BUILTIN_STRATEGIES,
                         pq_samples: int = 10_000, clique_limit: int = 20):
    """Sample ``t^2`` uniform strings and certify them against a strategy suite.

    A sequence passes when, for every strategy, the adversary coloring has no
    monochromatic clique above ``clique_limit`` and found cliques have the
    expected string shape; for ``t >= 10`` additionally every sampled
    ``P(S, q)`` with ``|S| = 10`` is at most 9.  Failing sequences are
    resampled up to ``max_retries`` times.
    """
    square_root(t)
    for attempt in range(max_retries + 1):
        strings = sample_strings(t, [seed, attempt], t * t)
        per, worst, shape = {}, 0, True
        for name in strategies:
            tr = clique_game_play(t, builtin_strategy(name, seed), strings.tolist())
            size, witness = tr.adversary_clique(return_witness=True)
            per[name] = {"adversary_clique": size, "algorithm_clique": tr.algorithm_clique(),
                         "vertices": tr.n, "halted": tr.full_slot is not None}
            worst = max(worst, size)
            if size >= 3:
                shape &= clique_string_shape_ok(tr, witness)
        pq_max, checked = None, 0
        if t >= 10 and pq_samples:
            counts = p_s_q_counts(strings, pq_samples, [seed, attempt, 1])
            pq_max, checked = int(counts.max()), pq_samples
        ok = worst <= clique_limit and shape and (pq_max is None or pq_max <= 9)
        if ok:
            cert = GoodSequenceCertificate(t, seed, attempt, worst, per, shape, checked, pq_max, True)
            return strings, cert
    raise RetriesExhausted(f"no good sequence for t={t}, seed={seed} in {max_retries + 1} tries")
