"""The ten acceptance checks, each a function of a base seed.

Every check returns a :class:`CellResult`.  ``ratios`` holds the measured
quantity relative to the bound being certified (<= 1 means within bound) or,
for the lower-bound constructions, the measured competitive ratio.  A cell
passes when it has no failures and finished inside its time budget.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..adversaries.clique_game import BUILTIN_STRATEGIES, RetriesExhausted, sample_good_sequence
from ..adversaries.encoding import CliqueEncoding
from ..adversaries.pairing import vsany_u_pairing_adversary
from ..core import FORBIDDEN, MAKESPAN, Instance, NormSpec, load_matrix, lr_norm
from ..oracles import (brute_force_opt, encoding_loads_oracle, exact_potential, exhaustive_clique,
                       opt_lower_bound_lr)
from ..adversaries.cliques import max_mono_clique
from ..schedulers import (GreedyMakespan, VsanyUGreedy, VsmaxIDerandomized, VsmaxIRandomized,
                          make_scheduler, run_instance, vsall_bound_factor, vsall_i)
from ..schedulers.vsany import VsanyPotentialConfig, vsany_certificate
from ..transforms import check_properties, normalize_volume, vsmax_pipeline
from .gen import DISTRIBUTIONS, planted_feasible, random_identical

REL = 1e-12


@dataclass
class CellResult:
    name: str
    trials: int = 0
    failures: int = 0
    ratios: list[float] = field(default_factory=list)
    elapsed: float = 0.0
    limit: float = math.inf
    detail: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.elapsed < self.limit

    def fail(self, note: str) -> None:
        self.failures += 1
        if len(self.notes) < 5:
            self.notes.append(note)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" [{'; '.join(self.notes)}]" if self.notes else ""
        budget = f" / {self.limit:.0f}s" if math.isfinite(self.limit) else ""
        return (f"{status} {self.name}: {self.detail} ({self.trials} trials, {self.failures} failures, "
                f"{self.elapsed:.2f}s{budget}){extra}")


def _rng(seed: int, tag: int, idx: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, tag, idx])


def _timed(name: str, limit: float):
    def wrap(fn):
        def run(seed: int = 0) -> CellResult:
            cell = CellResult(name, limit=limit)
            t0 = time.perf_counter()
            fn(cell, seed)
            cell.elapsed = time.perf_counter() - t0
            return cell
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.cell_name = name
        return run
    return wrap


def _transformed(rng, m: int, d: int, n: int) -> Instance:
    # an all-zero instance has nothing to normalize, so it is redrawn
    while True:
        dist = DISTRIBUTIONS[int(rng.integers(0, len(DISTRIBUTIONS)))]
        raw = random_identical(rng, m, d, n, dist)
        if raw.max_load > 0:
            return vsmax_pipeline(raw)


@_timed("potential-monotone", 30)
def potential_monotone(cell: CellResult, seed: int) -> None:
    """Derandomized VSMAX-I: potential never rises, ends at most m*d; overflow bounds."""
    worst_step = 0.0
    for idx in range(100):
        rng = _rng(seed, 1, idx)
        m, d, n = int(rng.integers(1, 17)), int(rng.choice([4, 16, 64])), int(rng.integers(1, 501))
        inst = _transformed(rng, m, d, n)
        cell.trials += 1
        if not check_properties(inst, "vsmax").passed:
            cell.fail(f"#{idx}: transformed instance violates a property")
        res = run_instance(VsmaxIDerandomized(m, d), inst)
        phi = np.asarray(res.trace["potential"])
        steps = phi[1:] / phi[:-1]
        worst_step = max(worst_step, float(steps.max(initial=0.0)))
        v2 = res.info["overflow_volume"]
        m2 = res.pools["overflow"].loads.max(initial=0.0)
        if np.any(phi[1:] > phi[:-1] * (1 + REL)):
            cell.fail(f"#{idx}: potential increased")
        if phi[-1] > m * d * (1 + REL):
            cell.fail(f"#{idx}: final potential {phi[-1]} > {m * d}")
        if v2 > m / d * (1 + REL):
            cell.fail(f"#{idx}: overflow volume {v2} > m/d")
        if m2 > (v2 / m + 1) * (1 + REL):
            cell.fail(f"#{idx}: overflow makespan {m2} > V2/m + 1")
        cell.ratios.append(float(phi[-1] / (m * d)))
    cell.detail = f"max step ratio {worst_step:.6g}, max final potential/(md) {max(cell.ratios):.3g}"


@_timed("vsmax-oracle", 60)
def vsmax_oracle(cell: CellResult, seed: int) -> None:
    """Tiny instances: derandomized makespan within 3a+2+V2/m+1; transformed OPT >= 1."""
    worst_opt = math.inf
    for idx in range(200):
        rng = _rng(seed, 2, idx)
        m, n, d = int(rng.integers(1, 4)), int(rng.integers(1, 9)), int(rng.integers(1, 7))
        inst = _transformed(rng, m, d, n)
        cell.trials += 1
        res = run_instance(VsmaxIDerandomized(m, d), inst)
        bound = 3 * res.info["alpha"] + 2 + res.info["overflow_volume"] / m + 1
        span = res.loads.makespan()
        if span > bound * (1 + REL):
            cell.fail(f"#{idx}: makespan {span} > {bound}")
        opt, _ = brute_force_opt(inst, "makespan")
        worst_opt = min(worst_opt, opt)
        if opt < 1 - 1e-12:
            cell.fail(f"#{idx}: transformed OPT {opt} < 1")
        cell.ratios.append(span / bound)
    cell.detail = f"max makespan/bound {max(cell.ratios):.3g}, min transformed OPT {worst_opt:.6g}"


@_timed("vsmax-randomized", 60)
def vsmax_randomized(cell: CellResult, seed: int) -> None:
    """Randomized VSMAX-I: M1 loads stay below 2a+2; few jobs pass to M2."""
    m, d, n = 8, 16, 200
    passed = total = 0
    for idx in range(1000):
        rng = _rng(seed, 3, idx)
        inst = _transformed(rng, m, d, n)
        cell.trials += 1
        sched = VsmaxIRandomized(m, d, seed=int(rng.integers(0, 2 ** 63)))
        res = run_instance(sched, inst)
        top = res.pools["primary"].loads.max(initial=0.0)
        limit = 2 * res.info["alpha"] + 2
        if not top < limit:
            cell.fail(f"#{idx}: M1 load {top} >= {limit}")
        passed += res.info["passed"]
        total += n
        cell.ratios.append(top / limit)
    frac = passed / total
    if frac > 0.05:
        cell.fail(f"pass fraction {frac:.4f} > 0.05")
    cell.detail = f"max M1 load/(2a+2) {max(cell.ratios):.3g}, pass fraction {frac:.4g}"


@_timed("vsall-certificate", 60)
def vsall_certificate(cell: CellResult, seed: int) -> None:
    """VSALL-I: every norm within 2^(1+1/r) a'^((r-1)/r) times the lower bound."""
    for idx in range(100):
        rng = _rng(seed, 4, idx)
        m, d, n = int(rng.integers(1, 17)), int(rng.integers(1, 17)), int(rng.integers(1, 201))
        dist = DISTRIBUTIONS[int(rng.integers(0, len(DISTRIBUTIONS)))]
        raw = random_identical(rng, m, d, n, dist)
        res = vsall_i(raw)
        norm = normalize_volume(raw)
        loads = load_matrix(norm, res.assignment.machines)
        a_prime = res.info["alpha_prime"]
        exps = [1, 2, 3, 4] + ([math.log2(m)] if m >= 2 else [])
        worst = 0.0
        for k in range(d):
            for r in exps:
                cell.trials += 1
                bound = vsall_bound_factor(a_prime, float(r)) * opt_lower_bound_lr(norm, k, r)
                value = lr_norm(loads, k, r)
                if value > bound * (1 + 1e-9):
                    cell.fail(f"#{idx} k={k} r={r}: {value} > {bound}")
                if bound > 0:
                    worst = max(worst, value / bound)
        cell.ratios.append(worst)
    cell.detail = f"max norm/bound {max(cell.ratios):.3g}"


def _rational_state(rng, m: int, d: int, n: int):
    jobs = []
    for _ in range(n):
        job = [[Fraction(int(rng.integers(0, 17)), int(rng.integers(1, 17))) for _ in range(d)]
               for _ in range(m)]
        forbid = rng.random(m) < 0.15
        forbid[int(rng.integers(0, m))] = False
        for i in np.flatnonzero(forbid):
            job[i] = [None] * d
        jobs.append(job)
    return jobs


@_timed("vsany-exactness", 30)
def vsany_exactness(cell: CellResult, seed: int) -> None:
    """VSANY-U greedy choice equals the exact-arithmetic argmin at every step."""
    methods: dict[str, int] = {}
    idx = 0
    while cell.trials < 100:
        rng = _rng(seed, 5, idx)
        idx += 1
        m, d = int(rng.integers(2, 5)), int(rng.choice([1, 2]))
        rs = tuple(int(x) for x in rng.integers(1, 4, size=d))
        spec = NormSpec(rs, np.ones(d))
        sched = VsanyUGreedy(m, d, spec, normalize=False)
        state = [[Fraction(0)] * d for _ in range(m)]
        for job in _rational_state(rng, m, d, int(rng.integers(1, 7))):
            if cell.trials >= 100:
                break
            cell.trials += 1
            want = exact_potential(state, job, rs)
            methods[want.method] = methods.get(want.method, 0) + 1
            vec = np.array([[FORBIDDEN if x is None else float(x) for x in row] for row in job])
            got = sched.step(vec)
            if not want.decided:
                cell.fail(f"step {cell.trials}: undecided {want.undecided_pairs}")
            elif got != want.argmin:
                cell.fail(f"step {cell.trials}: scheduler {got} vs oracle {want.argmin}")
            state[got] = [a + b for a, b in zip(state[got], job[got])]
            cell.ratios.append(1.0 if got == want.argmin else 0.0)
    cell.detail = "agreement {:.0%}; oracle methods {}".format(
        sum(cell.ratios) / len(cell.ratios), ", ".join(f"{k}={v}" for k, v in sorted(methods.items())))


@_timed("vsany-certificate", 60)
def vsany_planted(cell: CellResult, seed: int) -> None:
    """VSANY-U on planted-feasible instances: potential and per-dimension norm certificates."""
    for idx in range(50):
        rng = _rng(seed, 6, idx)
        m, d, n = int(rng.integers(2, 17)), int(rng.integers(1, 9)), int(rng.integers(1, 61))
        top = math.log2(m)
        choices = [r for r in (1, 2, top) if r <= top]
        norms = tuple(choices[int(rng.integers(0, len(choices)))] for _ in range(d))
        inst, spec, _ = planted_feasible(rng, m, d, n, norms, forbid=float(rng.choice([0.0, 0.3])))
        cell.trials += 1
        res = run_instance(VsanyUGreedy(m, d, spec), inst)
        config = VsanyPotentialConfig.from_norms(spec, m)
        cert = vsany_certificate(res.loads.loads, config)
        if not cert["potential_ok"]:
            cell.fail(f"#{idx}: potential certificate {cert['log2_lhs']} > {cert['log2_d']}")
        if not cert["norm_ok"]:
            cell.fail(f"#{idx}: some L_k > 20 q_k")
        cell.ratios.append(max(a / b for a, b in zip(cert["norms"], cert["norm_bounds"])))
    cell.detail = f"max L_k/(20 q_k) {max(cell.ratios):.3g}"


@_timed("pairing-exact", 5)
def pairing_exact(cell: CellResult, seed: int) -> None:
    """Halving adversary: witness norm h+1 and reverse norms 1, exactly."""
    factories = {
        "vsany-u": lambda m, d, ns: VsanyUGreedy(m, d, ns),
        "greedy": lambda m, d, ns: GreedyMakespan(m, d),
    }
    for h in range(1, 7):
        for name, factory in factories.items():
            cell.trials += 1
            res = vsany_u_pairing_adversary(h, factory)
            w, rev = res.witness_norm(), res.reverse_norms()
            if w != h + 1 or any(x != 1.0 for x in rev):
                cell.fail(f"{name} h={h}: witness {w}, reverse max {max(rev)}")
            cell.ratios.append(w / max(rev))
    cell.detail = "ratios " + " ".join(f"{r:g}" for r in cell.ratios[::2])


@_timed("clique-game", 120)
def clique_game(cell: CellResult, seed: int) -> None:
    """Clique game: every strategy is forced to a sqrt(t) clique; good sequences need no retries."""
    zero_retry = {}
    for t in (4, 9, 16):
        s = math.isqrt(t)
        clean = 0
        for x in range(100):
            cell.trials += 1
            try:
                _, cert = sample_good_sequence(t, seed * 1000 + x)
            except RetriesExhausted:
                cell.fail(f"t={t} seed {x}: retries exhausted")
                continue
            clean += cert.retries == 0
            for name in BUILTIN_STRATEGIES:
                info = cert.per_strategy[name]
                if info["algorithm_clique"] != s or not info["halted"] or info["vertices"] > t * t:
                    cell.fail(f"t={t} seed {x} {name}: {info}")
            cell.ratios.append(cert.max_adversary_clique / 20)
        zero_retry[t] = clean
        if clean < 95:
            cell.fail(f"t={t}: only {clean}/100 seeds passed without retry")
    cell.detail = "zero-retry seeds " + ", ".join(f"t={t}: {c}/100" for t, c in zero_retry.items())


@_timed("encoding-structure", 120)
def encoding_structure(cell: CellResult, seed: int) -> None:
    """Clique encoding: per-(machine, dim) loads match an independent recount; witness load sqrt m."""
    plan = {4: ("vsmax-i-derand", "vsmax-i-rand", "greedy", "random"), 9: ("vsmax-i-derand", "greedy")}
    for m, algorithms in plan.items():
        for algorithm in algorithms:
            cell.trials += 1
            enc = CliqueEncoding(m, seed=seed)
            res = enc.run(make_scheduler(algorithm, m, enc.d, seed=seed))
            oracle = encoding_loads_oracle(res.transcript.adjacency, res.machines, m)
            same = set(oracle) == set(res.loads) and all(np.array_equal(oracle[k], res.loads[k]) for k in oracle)
            if not same:
                cell.fail(f"m={m} {algorithm}: loads differ from recount")
            s = math.isqrt(m)
            if res.witness is None or int(res.dim_loads(res.witness).max()) != s:
                cell.fail(f"m={m} {algorithm}: witness load not {s}")
            else:
                adv = res.adversary_dim_loads(res.witness).max()
                cell.ratios.append(float(s / adv))
    cell.detail = "d = 120 and 85320; witness ratios " + " ".join(f"{r:g}" for r in cell.ratios)


def _random_graph(rng):
    n = int(rng.integers(1, 21))
    p = float(rng.uniform(0.2, 0.95))
    adj = [set() for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                adj[a].add(b)
                adj[b].add(a)
    colors = rng.integers(0, int(rng.integers(1, 5)), size=n).tolist()
    return adj, colors


@_timed("oracle-consistency", 60)
def oracle_consistency(cell: CellResult, seed: int) -> None:
    """Clique oracle agrees with branch and bound; the Lr lower bound never exceeds OPT."""
    for idx in range(200):
        adj, colors = _random_graph(_rng(seed, 10, idx))
        cell.trials += 1
        a, b = exhaustive_clique(adj, colors), max_mono_clique(adj, colors)
        if a != b:
            cell.fail(f"graph #{idx}: exhaustive {a} vs branch-and-bound {b}")
    worst = 0.0
    for idx in range(100):
        rng = _rng(seed, 11, idx)
        m, n, d = int(rng.integers(1, 4)), int(rng.integers(0, 8)), int(rng.integers(1, 5))
        inst = random_identical(rng, m, d, n, DISTRIBUTIONS[idx % len(DISTRIBUTIONS)])
        for k in range(d):
            for r in (1, 2, 3, 4, MAKESPAN):
                cell.trials += 1
                lb = opt_lower_bound_lr(inst, k, r)
                opt, _ = brute_force_opt(inst, "lr", k=k, r=r)
                if lb > opt * (1 + REL) + 1e-15:
                    cell.fail(f"instance #{idx} k={k} r={r}: bound {lb} > opt {opt}")
                if opt > 0:
                    worst = max(worst, lb / opt)
    cell.ratios.append(worst)
    cell.detail = f"max lower bound/OPT {worst:.6g}"


CRITERIA = (potential_monotone, vsmax_oracle, vsmax_randomized, vsall_certificate, vsany_exactness,
            vsany_planted, pairing_exact, clique_game, encoding_structure, oracle_consistency)
