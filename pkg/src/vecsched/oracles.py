"""Brute-force and exact-arithmetic references for the tests.

Nothing in here is used by the schedulers themselves; these are the
independent second route the checks compare against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np
from mpmath import iv

from .core import MAKESPAN, Assignment, Instance, NormSpec, VecSchedError, is_forbidden


class TooLarge(VecSchedError):
    pass


class NonIntegerExponent(VecSchedError):
    pass


# --- exhaustive assignment search -----------------------------------------

def _objective_values(loads: np.ndarray, objective: str, k, r, norm_spec) -> np.ndarray:
    """Objective per enumerated assignment; ``loads`` has shape (chunk, m, d)."""
    if objective == "makespan":
        return loads.max(axis=(1, 2))
    if objective == "lr":
        col = loads[:, :, k]
        if r is MAKESPAN:
            return col.max(axis=1)
        return (col ** float(r)).sum(axis=1) ** (1.0 / float(r))
    if objective == "targets":
        out = np.zeros(loads.shape[0])
        for kk, (rk, tk) in enumerate(zip(norm_spec.exponents, norm_spec.targets)):
            col = loads[:, :, kk]
            nk = col.max(axis=1) if rk is MAKESPAN else (col ** float(rk)).sum(axis=1) ** (1.0 / float(rk))
            if tk > 0:
                ratio = nk / tk
            else:
                ratio = np.where(nk > 0, np.inf, 0.0)
            out = np.maximum(out, ratio)
        return out
    raise ValueError(f"unknown objective {objective!r}")


def brute_force_opt(instance: Instance, objective: str = "makespan", *, k: int | None = None,
                    r=None, norm_spec: NormSpec | None = None, limit: int = 10 ** 7,
                    chunk: int = 1 << 15) -> tuple[float, Assignment]:
    """Minimum of ``objective`` over every assignment, with its witness.

    Objectives: ``"makespan"`` (max over machines and dimensions),
    ``"lr"`` (``||L(k)||_r`` for the given ``k``, ``r``) and ``"targets"``
    (``max_k ||L(k)||_{r_k} / T_k``, so a value <= 1 means the targets are
    met).  Assignments are enumerated as a mixed-radix counter with job 0 as
    the most significant digit, so the first minimum found is the
    lexicographically smallest.  FORBIDDEN placements are skipped.
    """
    n, m, d = instance.n, instance.m, instance.d
    total = m ** n
    if total > limit:
        raise TooLarge(f"{m}^{n} = {total} assignments exceeds the limit {limit}")
    if objective == "lr" and (k is None or r is None):
        raise ValueError("objective 'lr' needs k and r")
    if objective == "targets" and norm_spec is None:
        raise ValueError("objective 'targets' needs a norm spec")
    if n == 0:
        return float(_objective_values(np.zeros((1, m, d)), objective, k, r, norm_spec)[0]), Assignment([])
    per_machine = instance.jobs if instance.model == "unrelated" else np.broadcast_to(
        instance.jobs[:, None, :], (n, m, d))
    weights = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_val, best_idx = math.inf, None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // weights) % m
        loads = np.zeros((idx.size, m, d))
        bad = np.zeros(idx.size, dtype=bool)
        rows = np.arange(idx.size)
        for j in range(n):
            sel = per_machine[j][digits[:, j]]
            inf_rows = np.any(is_forbidden(sel), axis=1)
            bad |= inf_rows
            loads[rows, digits[:, j]] += np.where(inf_rows[:, None], 0.0, sel)
        vals = _objective_values(loads, objective, k, r, norm_spec)
        vals = np.where(bad, np.inf, vals)
        pos = int(np.argmin(vals))
        if vals[pos] < best_val:
            best_val, best_idx = float(vals[pos]), int(idx[pos])
    if best_idx is None:
        raise TooLarge("no feasible assignment")
    witness = [(best_idx // int(w)) % m for w in weights]
    return best_val, Assignment(witness)


def opt_lower_bound_lr(instance: Instance, k: int, r) -> float:
    """``max(sum_j p_j^r, m (sum_j p_j / m)^r) ** (1/r)`` for dimension ``k``.

    For MAKESPAN the analogous ``max(max_j p_j, sum_j p_j / m)``.
    """
    if instance.model != "identical":
        raise ValueError("lower bound is for identical machines")
    p = instance.jobs[:, k] if instance.n else np.zeros(0)
    total = float(p.sum())
    m = instance.m
    if r is MAKESPAN:
        return max(float(p.max()) if p.size else 0.0, total / m)
    r = float(r)
    top = max(float(p.max()) if p.size else 0.0, total / m)
    if top == 0:
        return 0.0
    a = float(np.sum((p / top) ** r))
    b = m * (total / m / top) ** r
    return top * max(a, b) ** (1.0 / r)


# --- exact VSANY-U potential -----------------------------------------------

@dataclass
class ExactPotentialResult:
    argmin: int
    decided: bool
    method: str
    values: dict[int, object] = field(default_factory=dict)
    undecided_pairs: list[tuple[int, int]] = field(default_factory=list)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _exponents(exponents: Sequence[int], d: int) -> tuple[list[int], list[int]]:
    lg = d.bit_length() - 1
    if d < 1 or (1 << lg) != d:
        raise NonIntegerExponent("d must be a power of two for integer q_k")
    rs = []
    for r in exponents:
        if r is MAKESPAN or Fraction(r).denominator != 1 or r < 1:
            raise NonIntegerExponent(f"r_k = {r!r} is not a positive integer")
        rs.append(int(r))
    return rs, [r + lg for r in rs]


def _power_sums(loads, job, i: int, rs: list[int]) -> tuple[Fraction, ...]:
    m = len(loads)
    out = []
    for k, r in enumerate(rs):
        s = Fraction(0)
        for ii in range(m):
            x = loads[ii][k] + (job[i][k] if ii == i else 0)
            s += x ** r
        out.append(s)
    return tuple(out)


def _exact_value(sums, rs, qs) -> Fraction:
    total = Fraction(0)
    for s, r, q in zip(sums, rs, qs):
        total += Fraction(1, (3 * q) ** q) * s ** (q // r)
    return total


def _interval_value(sums, rs, qs, prec: int):
    saved = iv.prec
    iv.prec = prec
    try:
        total = iv.mpf(0)
        for s, r, q in zip(sums, rs, qs):
            if s == 0:
                continue
            base = iv.mpf(s.numerator) / iv.mpf(s.denominator)
            alpha = iv.mpf(1) / iv.mpf((3 * q) ** q)
            total += alpha * base ** (iv.mpf(q) / iv.mpf(r))
        return total
    finally:
        iv.prec = saved


def exact_potential_value(loads, exponents: Sequence[int], prec: int = 256):
    """``sum_k a_k L_k^q_k`` exactly when every ``q_k / r_k`` is integral,
    otherwise as an ``mpmath`` interval at ``prec`` bits."""
    loads = [[_frac(x) for x in row] for row in loads]
    d = len(loads[0])
    rs, qs = _exponents(exponents, d)
    zero = [[Fraction(0)] * d for _ in loads]
    sums = _power_sums(loads, zero, 0, rs)
    if all(q % r == 0 for r, q in zip(rs, qs)):
        return _exact_value(sums, rs, qs)
    return _interval_value(sums, rs, qs, prec)


def exact_potential(loads, job, exponents: Sequence[int], *, start_prec: int = 64,
                    max_prec: int = 4096) -> ExactPotentialResult:
    """Exact argmin of the post-assignment potential over eligible machines.

    ``loads`` is the current ``m x d`` normalized load state, ``job`` the
    ``m x d`` normalized job loads (``None`` or ``inf`` for FORBIDDEN),
    ``exponents`` the integer ``r_k``; ``d`` must be a power of two.
    Ties go to the lowest index.  With ``d = 1`` the power sums are compared
    directly; when every ``q_k / r_k`` is integral the potential is a
    rational; otherwise interval arithmetic is escalated up to ``max_prec``
    bits and anything still overlapping is reported in ``undecided_pairs``.
    """
    loads = [[_frac(x) for x in row] for row in loads]
    m, d = len(loads), len(loads[0])
    rs, qs = _exponents(exponents, d)
    eligible = []
    jobf = []
    for i in range(m):
        row = job[i]
        forb = any(x is None or (isinstance(x, float) and math.isinf(x)) for x in row)
        jobf.append([Fraction(0)] * d if forb else [_frac(x) for x in row])
        if not forb:
            eligible.append(i)
    if not eligible:
        raise ValueError("no eligible machine")
    sums = {i: _power_sums(loads, jobf, i, rs) for i in eligible}

    if d == 1:
        method = "power-sum"
        key = {i: sums[i][0] for i in eligible}
    elif all(q % r == 0 for r, q in zip(rs, qs)):
        method = "rational"
        key = {i: _exact_value(sums[i], rs, qs) for i in eligible}
    else:
        method = "interval"
        key = None

    if key is not None:
        best = min(eligible, key=lambda i: (key[i], i))
        return ExactPotentialResult(best, True, method, dict(key))

    def same(a, b):
        # identical multisets of (r, q, power sum) give identical potentials
        return sorted(zip(rs, qs, sums[a])) == sorted(zip(rs, qs, sums[b]))

    def compare(a, b):
        if same(a, b):
            return 0
        prec = start_prec
        while prec <= max_prec:
            va = _interval_value(sums[a], rs, qs, prec)
            vb = _interval_value(sums[b], rs, qs, prec)
            if va.b < vb.a:
                return -1
            if va.a > vb.b:
                return 1
            prec *= 2
        return None

    best = eligible[0]
    undecided = []
    for i in eligible[1:]:
        c = compare(i, best)
        if c is None:
            undecided.append((best, i))
        elif c < 0:
            best = i
    values = {i: _interval_value(sums[i], rs, qs, 256) for i in eligible}
    return ExactPotentialResult(best, not undecided, method, values, undecided)


# --- cliques -------------------------------------------------------------

def exhaustive_clique(adjacency: Sequence, coloring: Sequence, max_class: int = 20) -> int:
    """Largest monochromatic clique by level-wise enumeration of all cliques.

    Every clique of size ``s + 1`` is built from a clique of size ``s``, so
    all vertex subsets that could be cliques get visited.
    """
    adj = [set(a) for a in adjacency]
    classes: dict = {}
    for v, c in enumerate(coloring):
        classes.setdefault(c, []).append(v)
    best = 0
    for members in classes.values():
        if len(members) > max_class:
            raise TooLarge(f"color class of {len(members)} vertices exceeds {max_class}")
        level = [(v,) for v in members]
        size = 1 if level else 0
        while level:
            size = len(level[0])
            nxt = []
            for clique in level:
                last = clique[-1]
                for v in members:
                    if v > last and all(v in adj[u] for u in clique):
                        nxt.append(clique + (v,))
            level = nxt
        best = max(best, size)
    return best


def all_subsets_clique(adjacency: Sequence, vertices: Sequence[int]) -> bool:
    adj = [set(a) for a in adjacency]
    return all(b in adj[a] for a, b in combinations(vertices, 2))


# --- clique-encoding loads -------------------------------------------------

def encoding_loads_oracle(adjacency: Sequence, machines: Sequence[int], m: int) -> dict[int, np.ndarray]:
    """Per-dimension machine loads of the clique encoding, recounted from scratch.

    Walks every ``sqrt(m)``-subset of the ``m^2`` vertices (numbered in colex
    order by sorting on the reversed tuple) and credits vertex ``v`` of the
    subset to its machine when the subset's members up to ``v`` are pairwise
    adjacent.  Only nonzero columns are returned.
    """
    s = math.isqrt(m)
    n_vertices = m * m
    issued = len(machines)
    adj = [set(a) for a in adjacency]
    subsets = sorted(combinations(range(n_vertices), s), key=lambda c: c[::-1])
    out: dict[int, np.ndarray] = {}
    for dim, subset in enumerate(subsets):
        members = [v for v in subset if v < issued]
        col = None
        for pos, v in enumerate(members):
            # once the prefix stops being a clique no later member counts
            if all(v in adj[u] for u in members[:pos]):
                if col is None:
                    col = np.zeros(m, dtype=np.int64)
                col[machines[v]] += 1
            else:
                break
        if col is not None:
            out[dim] = col
    return out

