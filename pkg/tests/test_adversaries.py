import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecsched import MAKESPAN
from vecsched.adversaries import (BUILTIN_STRATEGIES, CapExceeded, CliqueEncoding, CliqueGame,
                                  GameTranscript, PairingAdversary, SizeLimit, builtin_strategy,
                                  clique_game_play, clique_string_shape_ok, colex_rank,
                                  colex_unrank, encode_vsmax_adaptive, encoding_dimension,
                                  lr_ratio_report, max_mono_clique, p_s_q_counts, random_strings,
                                  sample_good_sequence, sample_strings, slot_cliques_ok,
                                  vsany_u_pairing_adversary)
from vecsched.oracles import encoding_loads_oracle, exhaustive_clique
from vecsched.schedulers import GreedyMakespan, RandomAssign, VsanyUGreedy, make_scheduler


# --- clique game -------------------------------------------------------------

def test_fixed_bin_fills_a_slot_fast():
    tr = clique_game_play(4, builtin_strategy("fixed:0"), random_strings(4, 0))
    assert tr.full_slot is not None and tr.full_slot[0] == 0
    assert tr.n <= 4 * 4
    assert tr.algorithm_clique() == 2


def test_fixed_bin_with_constant_strings():
    # all strings point at slot 0 of every bin: the second vertex fills it
    tr = clique_game_play(4, builtin_strategy("fixed:0"), [(0, 0, 0, 0)] * 10)
    assert tr.n == 2 and tr.full_slot == [0, 0] and tr.algorithm_clique() == 2


@pytest.mark.parametrize("t", [4, 9, 16, 25])
@pytest.mark.parametrize("name", BUILTIN_STRATEGIES)
def test_every_strategy_forced_to_sqrt_t(t, name):
    for seed in range(5):
        tr = clique_game_play(t, builtin_strategy(name, seed), random_strings(t, seed))
        assert tr.full_slot is not None and tr.n <= t * t
        assert tr.algorithm_clique() == math.isqrt(t)
        assert slot_cliques_ok(tr)


def test_adjacency_is_union_of_target_slots():
    game = CliqueGame(9)
    strings = list(random_strings(9, 3, 40))
    strategy = builtin_strategy("random", 1)
    for string in strings:
        if game.halted:
            break
        occupants = {(b, q): list(game.occupants[b][q]) for b in range(9) for q in range(3)}
        nbrs = game.issue(string)
        assert nbrs == {v for b, q in enumerate(string) for v in occupants[(b, q)]}
        game.place(strategy(game, string))


def test_colors_from_slot_set():
    tr = clique_game_play(16, builtin_strategy("greedy"), random_strings(16, 5))
    assert all(c // 4 == q for c, q in zip(tr.colors, tr.slots))


def test_game_replay_determinism():
    a = clique_game_play(9, builtin_strategy("random", 2), random_strings(9, 11))
    b = clique_game_play(9, builtin_strategy("random", 2), random_strings(9, 11))
    assert a.to_dict() == b.to_dict()
    assert GameTranscript.from_dict(a.to_dict()).to_dict() == a.to_dict()


def test_game_argument_checks():
    with pytest.raises(ValueError):
        CliqueGame(5)
    game = CliqueGame(4)
    with pytest.raises(ValueError):
        game.issue((0, 0, 0))
    with pytest.raises(RuntimeError):
        game.place(0)


def test_shape_check_on_adversary_cliques():
    for seed in range(10):
        tr = clique_game_play(16, builtin_strategy("greedy"), random_strings(16, seed))
        size, clique = tr.adversary_clique(return_witness=True)
        if size >= 3:
            assert clique_string_shape_ok(tr, clique)
        assert size <= 20


def test_bad_edge_restriction_agrees_with_full_search():
    for seed in range(5):
        tr = clique_game_play(9, builtin_strategy("round-robin"), random_strings(9, seed))
        assert tr.adversary_clique() == max_mono_clique(tr.adjacency, tr.colors)
        assert tr.adversary_clique() == exhaustive_clique(tr.adjacency, tr.colors, max_class=100)


# --- clique solver ---------------------------------------------------------------

def test_max_mono_clique_basics():
    assert max_mono_clique([], []) == 0
    assert max_mono_clique([set()], [0]) == 1
    tri = [{1, 2}, {0, 2}, {0, 1}]
    assert max_mono_clique(tri, [0, 0, 0]) == 3
    assert max_mono_clique(tri, [0, 0, 0], return_witness=True) == (3, [0, 1, 2])
    with pytest.raises(SizeLimit):
        max_mono_clique([set()] * 10, [0] * 10, cap=5)


def test_thirty_vertex_graph_against_subsampled_oracle():
    rng = np.random.default_rng(7)
    n = 30
    adj = [set() for _ in range(n)]
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < 0.5:
            adj[a].add(b)
            adj[b].add(a)
    colors = rng.integers(0, 2, size=n).tolist()
    full = max_mono_clique(adj, colors)
    for trial in range(20):
        keep = sorted(rng.choice(n, size=20, replace=False).tolist())
        index = {v: x for x, v in enumerate(keep)}
        sub = [{index[u] for u in adj[v] if u in index} for v in keep]
        sub_colors = [colors[v] for v in keep]
        assert max_mono_clique(sub, sub_colors) == exhaustive_clique(sub, sub_colors)
        assert max_mono_clique(sub, sub_colors) <= full


# --- good sequences ----------------------------------------------------------------

def test_good_sequence_t4_no_retries():
    assert all(sample_good_sequence(4, seed)[1].retries == 0 for seed in range(100))


def test_good_sequence_t16_with_pq_check():
    strings, cert = sample_good_sequence(16, 3)
    assert strings.shape == (256, 16)
    assert cert.passed and cert.pq_checked == 10_000 and cert.pq_max <= 9
    again, cert2 = sample_good_sequence(16, 3)
    assert np.array_equal(strings, again) and cert2.to_dict() == cert.to_dict()


def test_p_s_q_counts_direct():
    strings = np.zeros((5, 16), dtype=np.int64)
    strings[0] = 1
    # q = 0 matches four strings, q = 1 one, q = 2 or 3 none
    assert set(p_s_q_counts(strings, 200, seed=0).tolist()) <= {0, 1, 4}
    strings = sample_strings(16, 1, 256)
    counts = p_s_q_counts(strings, 50, seed=9)
    rng = np.random.default_rng(9)
    subsets = np.argsort(rng.random((50, 16)), axis=1)[:, :10]
    targets = rng.integers(0, 4, size=50)
    for c, sub, q in zip(counts, subsets, targets):
        assert c == sum(all(row[b] == q for b in sub) for row in strings)


# --- encoding ------------------------------------------------------------------------

def test_encoding_dimensions():
    assert encoding_dimension(4) == 120
    assert encoding_dimension(9) == 85320
    with pytest.raises(CapExceeded):
        CliqueEncoding(16)
    with pytest.raises(ValueError):
        encoding_dimension(5)


@given(st.integers(1, 4), st.integers(0, 2000))
def test_colex_roundtrip(size, rank):
    subset = colex_unrank(rank, size)
    assert len(set(subset)) == size and colex_rank(subset) == rank


def test_colex_order_matches_sorted_enumeration():
    subsets = sorted(itertools.combinations(range(16), 2), key=lambda c: c[::-1])
    assert [colex_rank(s) for s in subsets] == list(range(120))


@pytest.mark.parametrize("algorithm", ["vsmax-i-derand", "vsmax-i-rand", "greedy", "random", "vsall-i"])
def test_encoding_structure_m4(algorithm):
    for seed in range(3):
        enc = CliqueEncoding(4, seed=seed)
        res = enc.run(make_scheduler(algorithm, 4, enc.d, seed=seed))
        oracle = encoding_loads_oracle(res.transcript.adjacency, res.machines, 4)
        assert set(oracle) == set(res.loads)
        assert all(np.array_equal(oracle[k], res.loads[k]) for k in oracle)
        assert int(res.dim_loads(res.witness).max()) == 2
        # at most sqrt(m) unit entries per dimension, and they form a clique
        for k, col in res.loads.items():
            assert col.sum() <= 2
        for j, dims in enumerate(res.job_dims):
            for k in dims:
                assert j in colex_unrank(k, 2)


def test_encoding_ratio_report():
    enc = CliqueEncoding(4, seed=1)
    res = enc.run(make_scheduler("vsmax-i-derand", 4, enc.d))
    rows = {row["r"]: row for row in lr_ratio_report(res)}
    assert rows["inf"]["algorithm"] == 2.0
    assert rows[1]["algorithm"] == rows[1]["adversary"] == 2.0
    assert rows[1]["ratio"] <= 1.0
    assert all(row["C"] <= 20 for row in rows.values())
    assert res.summary()["adversary_clique_ok"]


def test_encoding_m9_witness():
    res = encode_vsmax_adaptive(9, make_scheduler("vsmax-i-derand", 9, 85320), seed=2)
    assert res.d == 85320
    assert int(res.dim_loads(res.witness).max()) == 3
    assert res.dense().loads.shape == (9, 85320)


# --- pairing adversary ---------------------------------------------------------------

@pytest.mark.parametrize("h", range(1, 7))
def test_pairing_exact_ratio(h):
    for factory in (None, lambda m, d, ns: GreedyMakespan(m, d), lambda m, d, ns: RandomAssign(m, d, h)):
        res = vsany_u_pairing_adversary(h, factory)
        assert res.witness_norm() == h + 1
        assert res.reverse_norms() == [1.0] * (2 ** h)
        assert len(res.machines) == 2 ** h


def test_pairing_h1_shape():
    res = vsany_u_pairing_adversary(1)
    assert res.pairs == [(0, 1), (res.witness,)]
    assert res.summary()["ratio"] == 2.0


def test_pairing_halves_and_concentrates():
    res = vsany_u_pairing_adversary(4)
    sizes = [len(p) for p in res.phases]
    assert sizes == [16, 8, 4, 2, 1]
    off = res.loads.loads - np.diag(np.diag(res.loads.loads))
    assert not off.any()
    # reverse assignment never touches a forbidden machine
    for j, i in enumerate(res.reverse):
        assert np.isfinite(res.instance.jobs[j, i]).all()


def test_pairing_fallback_flag():
    adv = PairingAdversary(2, exponents=(1, 3, 2, MAKESPAN))
    res = adv.run(VsanyUGreedy(4, 4, adv.norm_spec))
    assert res.fallback_dims == [1]
