"""Exact maximum clique per color class by branch and bound.

Vertices of one color class are relabelled 0..n-1 and neighbourhoods held as
int bitsets; the search is the usual greedy-coloring bounded expansion.
"""
from __future__ import annotations

from typing import Sequence

from ..core import VecSchedError


class SizeLimit(VecSchedError):
    pass


def _color_order(p: int, nbr: list[int]) -> tuple[list[int], list[int]]:
    """Greedy sequential coloring of candidate set ``p``.

    Returns vertices in color order and, for each, the number of colors used
    up to it (an upper bound on the clique it can extend).
    """
    order, bounds = [], []
    color = 0
    rest = p
    while rest:
        color += 1
        avail = rest
        while avail:
            low = avail & -avail
            v = low.bit_length() - 1
            avail &= ~nbr[v] & ~low
            rest &= ~low
            order.append(v)
            bounds.append(color)
    return order, bounds


def _max_clique(nbr: list[int]) -> list[int]:
    n = len(nbr)
    if n == 0:
        return []
    best: list[int] = []
    current: list[int] = []

    def expand(p: int) -> None:
        nonlocal best
        order, bounds = _color_order(p, nbr)
        for idx in range(len(order) - 1, -1, -1):
            if len(current) + bounds[idx] <= len(best):
                return
            v = order[idx]
            current.append(v)
            sub = p & nbr[v]
            if sub:
                expand(sub)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            p &= ~(1 << v)

    expand((1 << n) - 1)
    return best


def max_mono_clique(adjacency: Sequence, coloring: Sequence, *, slots: Sequence | None = None,
                    bins: Sequence | None = None, cap: int = 5000,
                    return_witness: bool = False):
    """Size of the largest clique whose vertices all share a color.

    ``adjacency[v]`` is an iterable of neighbours of ``v``.  When the clique
    game's ``slots`` and ``bins`` are passed, only bad edges (same slot,
    different bins) are kept; in the adversary's coloring these are the only
    edges that can join equal colors, so the answer is unchanged and the
    search is smaller.  With ``return_witness`` a ``(size, vertices)`` pair
    is returned.
    """
    n = len(coloring)
    if n > cap:
        raise SizeLimit(f"{n} vertices exceeds the cap of {cap}")
    classes: dict = {}
    for v, c in enumerate(coloring):
        if c is None:
            continue
        classes.setdefault(c, []).append(v)
    best: list[int] = []
    for c in sorted(classes, key=repr):
        members = classes[c]
        if len(members) <= len(best):
            continue
        local = {v: idx for idx, v in enumerate(members)}
        nbr = [0] * len(members)
        for v in members:
            mask = 0
            for u in adjacency[v]:
                lu = local.get(u)
                if lu is None:
                    continue
                if slots is not None and (slots[u] != slots[v] or bins[u] == bins[v]):
                    continue
                mask |= 1 << lu
            nbr[local[v]] = mask
        clique = _max_clique(nbr)
        if len(clique) > len(best):
            best = sorted(members[x] for x in clique)
    if return_witness:
        return len(best), best
    return len(best)


def mono_cliques_by_color(adjacency: Sequence, coloring: Sequence, **kw) -> dict:
    """Largest clique inside each color class, keyed by color."""
    out = {}
    for c in sorted(set(x for x in coloring if x is not None), key=repr):
        masked = [x if x == c else None for x in coloring]
        out[c] = max_mono_clique(adjacency, masked, return_witness=True, **kw)
    return out
