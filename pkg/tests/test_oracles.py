import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import identical_instances, unrelated_instances
from vecsched import FORBIDDEN, MAKESPAN, Instance, NormSpec, load_matrix, lr_norm
from vecsched.adversaries import max_mono_clique
from vecsched.oracles import (NonIntegerExponent, TooLarge, brute_force_opt, exact_potential,
                              exact_potential_value, exhaustive_clique, opt_lower_bound_lr)
from vecsched.schedulers import baseline_greedy_makespan, vsmax_i_derandomized
from vecsched.transforms import vsmax_pipeline


def test_brute_force_examples():
    val, wit = brute_force_opt(Instance.identical([[1.0]], 2))
    assert val == 1.0 and wit.machines.tolist() == [0]
    val, wit = brute_force_opt(Instance.identical([[1.0], [1.0]], 2))
    assert val == 1.0 and wit.machines.tolist() == [0, 1]
    with pytest.raises(TooLarge):
        brute_force_opt(Instance.identical(np.ones((30, 1)), 3))


def test_brute_force_skips_forbidden():
    inst = Instance.unrelated([[[1.0], [FORBIDDEN]], [[5.0], [2.0]]])
    val, wit = brute_force_opt(inst)
    assert val == 2.0 and wit.machines.tolist() == [0, 1]


@given(unrelated_instances(max_m=3, max_d=2, max_n=5))
def test_brute_force_matches_itertools(inst):
    best = math.inf
    for choice in itertools.product(range(inst.m), repeat=inst.n):
        if any(np.isinf(inst.jobs[j, i]).any() for j, i in enumerate(choice)):
            continue
        best = min(best, load_matrix(inst, choice).makespan())
    val, wit = brute_force_opt(inst)
    assert val == pytest.approx(best, rel=1e-12, abs=0)
    assert load_matrix(inst, wit).makespan() == pytest.approx(val, rel=1e-12, abs=0)


def test_brute_force_targets_objective():
    inst = Instance.unrelated([[[2.0], [1.0]], [[2.0], [1.0]]])
    val, _ = brute_force_opt(inst, "targets", norm_spec=NormSpec((1,), [2.0]))
    assert val == 1.0


def test_lower_bound_examples():
    inst = Instance.identical([[1.0], [1.0]], 2)
    assert opt_lower_bound_lr(inst, 0, 2) == pytest.approx(math.sqrt(2))
    inst = Instance.identical([[1.0], [2.0], [4.0]], 2)
    assert opt_lower_bound_lr(inst, 0, 1) == pytest.approx(7.0)
    assert opt_lower_bound_lr(inst, 0, MAKESPAN) == 4.0


@given(identical_instances(max_m=3, max_d=2, max_n=6), st.sampled_from([1, 2, 3, 4, 1.5, MAKESPAN]))
def test_lower_bound_below_opt(inst, r):
    for k in range(inst.d):
        opt, _ = brute_force_opt(inst, "lr", k=k, r=r)
        assert opt_lower_bound_lr(inst, k, r) <= opt * (1 + 1e-12) + 1e-300


@given(identical_instances(max_m=3, max_d=3, max_n=6))
def test_opt_below_any_schedule(inst):
    opt, _ = brute_force_opt(inst)
    assert opt <= load_matrix(inst, baseline_greedy_makespan(inst)).makespan() * (1 + 1e-12) + 1e-300


def test_transformed_optimum_at_least_one(rng):
    for _ in range(50):
        m, n, d = int(rng.integers(1, 4)), int(rng.integers(1, 9)), int(rng.integers(1, 7))
        inst = vsmax_pipeline(Instance.identical(rng.random((n, d)) + 1e-3, m))
        assert brute_force_opt(inst)[0] >= 1 - 1e-12
        res = vsmax_i_derandomized(inst)
        assert res.loads.makespan() <= 3 * res.info["alpha"] + 2 + res.info["overflow_volume"] / m + 1


# --- exact potential ---------------------------------------------------------

def test_exact_potential_examples():
    assert exact_potential([[0]], [[3]], [1]).argmin == 0
    res = exact_potential([[0], [0]], [[1], [2]], [1])
    assert res.argmin == 0 and res.decided and res.method == "power-sum"


def test_exact_potential_ties_and_forbidden():
    res = exact_potential([[0, 0], [0, 0]], [[1, 1], [1, 1]], [1, 3])
    assert res.argmin == 0 and res.decided
    res = exact_potential([[0], [0]], [[None], [1]], [2])
    assert res.argmin == 1


def test_exact_potential_rational_value():
    # d = 2, r = (1, 1): q = 2, alpha = 1/36 per dimension
    val = exact_potential_value([[Fraction(1), Fraction(2)], [Fraction(3), Fraction(0)]], [1, 1])
    assert val == Fraction(1, 36) * 4 ** 2 + Fraction(1, 36) * 2 ** 2


def test_exact_potential_interval_method():
    res = exact_potential([[Fraction(1, 3), 0], [0, Fraction(1, 5)]], [[1, 2], [2, 1]], [2, 1])
    assert res.method == "interval" and res.decided


def test_exact_potential_rejects_bad_inputs():
    with pytest.raises(NonIntegerExponent):
        exact_potential([[0, 0, 0]], [[1, 1, 1]], [1, 1, 1])
    with pytest.raises(NonIntegerExponent):
        exact_potential([[0]], [[1]], [1.5])


# --- clique oracle -------------------------------------------------------------

def _graph(edges, n):
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def test_clique_examples():
    tri = _graph([(0, 1), (1, 2), (0, 2)], 3)
    assert exhaustive_clique(tri, [0, 0, 0]) == 3
    assert exhaustive_clique(_graph([(0, 1), (1, 2)], 3), [0, 0, 0]) == 2
    assert exhaustive_clique([], []) == 0
    assert exhaustive_clique([set()], [0]) == 1
    assert exhaustive_clique(tri, [0, 1, 0]) == 2
    assert exhaustive_clique(tri, [0, 1, 2]) == 1


@given(st.integers(0, 14), st.floats(0.0, 1.0), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_exhaustive_matches_branch_and_bound(n, p, colors, seed):
    rng = np.random.default_rng(seed)
    adj = _graph([e for e in itertools.combinations(range(n), 2) if rng.random() < p], n)
    coloring = rng.integers(0, colors, size=n).tolist()
    assert exhaustive_clique(adj, coloring) == max_mono_clique(adj, coloring)
