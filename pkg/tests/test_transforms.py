import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import identical_instances
from vecsched import FORBIDDEN, AllForbidden, Instance, NormSpec, lr_norm
from vecsched.oracles import brute_force_opt
from vecsched.transforms import (cap_by_max_job, check_properties, clip_to_one, floor_small_loads,
                                 normalize_targets, normalize_volume, vsmax_pipeline)


def test_normalize_volume_arithmetic():
    inst = Instance.identical([[4.0], [6.0]], m=5)
    assert normalize_volume(inst).jobs[0, 0] == pytest.approx(2.0)


def test_zero_dimension_untouched():
    inst = Instance.identical([[0.0, 1.0], [0.0, 3.0]], m=2)
    out = normalize_volume(inst)
    assert not out.jobs[:, 0].any()
    assert out.jobs[:, 1].sum() == pytest.approx(2.0)


def test_cap_boundary_and_halving():
    # T == V/m: unchanged
    inst = Instance.identical([[1.0], [1.0]], m=2)
    assert np.array_equal(cap_by_max_job(normalize_volume(inst), inst.volume, inst.max_load).jobs,
                          normalize_volume(inst).jobs)
    # T == 2 V/m: a normalized load of 1 becomes 0.5
    inst = Instance.identical([[2.0], [1.0], [1.0]], m=2)
    norm = normalize_volume(inst)
    assert norm.jobs[1, 0] == pytest.approx(0.5)
    capped = cap_by_max_job(norm, inst.volume, inst.max_load)
    assert capped.jobs[0, 0] == pytest.approx(1.0)
    assert capped.jobs[1, 0] == pytest.approx(0.5)


def test_floor_examples():
    assert floor_small_loads(Instance.identical([[1.0, 0.0]], m=1)).jobs.tolist() == [[1.0, 0.5]]
    same = Instance.identical([[0.3, 0.3, 0.3]], m=1)
    assert np.array_equal(floor_small_loads(same).jobs, same.jobs)


def test_clip_examples():
    out, large = clip_to_one(Instance.identical([[3.5, 0.9]], m=1))
    assert out.jobs.tolist() == [[1.0, 0.9]] and large.tolist() == [[True, False]]
    small = Instance.identical([[0.2, 1.0]], m=1)
    out, large = clip_to_one(small)
    assert np.array_equal(out.jobs, small.jobs) and not large.any()


def test_normalize_targets():
    inst = Instance.unrelated([[[6.0, 0.0]]])
    assert normalize_targets(inst, NormSpec((1, 1), [2.0, 1.0])).jobs[0, 0, 0] == 3.0
    # zero target: zero-load placement stays eligible, positive load is dropped
    inst = Instance.unrelated([[[1.0, 0.0], [1.0, 2.0]]])
    out = normalize_targets(inst, NormSpec((1, 1), [1.0, 0.0]))
    assert out.jobs[0, 0, 0] == 1.0 and np.isinf(out.jobs[0, 1]).all()
    with pytest.raises(AllForbidden):
        normalize_targets(Instance.unrelated([[[0.0, 1.0], [0.0, 2.0]]]), NormSpec((1, 1), [1.0, 0.0]))


def test_property_violation_and_empty():
    rep = check_properties(Instance.identical([[0.5, 1.5]], m=4), "vsall")
    assert not rep["unit_range"].passed and rep["unit_range"].witness == (0, 1)
    assert check_properties(Instance.identical(np.zeros((0, 3)), m=2, d=3)).passed


@given(identical_instances(max_n=30))
def test_pipeline_properties_hold(inst):
    out = vsmax_pipeline(inst)
    assert out.n == inst.n
    assert check_properties(out, "vsmax").passed


@given(identical_instances(max_n=20))
def test_pipeline_matches_stepwise_composition(inst):
    staged = floor_small_loads(cap_by_max_job(normalize_volume(inst), inst.volume, inst.max_load))
    np.testing.assert_allclose(vsmax_pipeline(inst).jobs, staged.jobs, rtol=1e-12, atol=0)


@given(identical_instances(max_n=20))
def test_idempotence(inst):
    once = floor_small_loads(inst)
    np.testing.assert_array_equal(floor_small_loads(once).jobs, once.jobs)
    clipped, _ = clip_to_one(inst)
    again, large = clip_to_one(clipped)
    np.testing.assert_array_equal(again.jobs, clipped.jobs)
    assert not large.any()


@given(identical_instances(max_n=20), st.data())
def test_scaling_equivariance(inst, data):
    machines = data.draw(st.lists(st.integers(0, inst.m - 1), min_size=inst.n, max_size=inst.n))
    from vecsched import load_matrix
    before = load_matrix(inst, machines)
    after = load_matrix(normalize_volume(inst), machines)
    for k in range(inst.d):
        v = inst.volume[k]
        factor = inst.m / v if v > 0 else 1.0
        for r in (1, 2, 3.5):
            assert lr_norm(after, k, r) == pytest.approx(lr_norm(before, k, r) * factor, rel=1e-12, abs=1e-300)


@given(identical_instances(max_n=30))
def test_floor_at_most_doubles_column_sums(inst):
    norm = cap_by_max_job(normalize_volume(inst), inst.volume, inst.max_load)
    sums = floor_small_loads(norm).jobs.sum(axis=0) if inst.n else np.zeros(inst.d)
    assert np.all(sums <= 2 * inst.m * (1 + 1e-12))


@given(identical_instances(max_m=3, max_d=3, max_n=6))
def test_floor_at_most_doubles_opt(inst):
    norm = cap_by_max_job(normalize_volume(inst), inst.volume, inst.max_load)
    before, _ = brute_force_opt(norm)
    after, _ = brute_force_opt(floor_small_loads(norm))
    assert after <= 2 * before * (1 + 1e-12) + 1e-15


def test_hundred_random_pipelines_pass(rng):
    for _ in range(100):
        m, d, n = (int(x) for x in rng.integers(1, [10, 10, 60]))
        jobs = rng.exponential(size=(n, d)) * (rng.random((n, d)) < 0.6)
        assert check_properties(vsmax_pipeline(Instance.identical(jobs, m, d))).passed


def test_clip_then_volume_properties(rng):
    jobs = rng.pareto(1.2, size=(40, 4))
    inst = Instance.identical(jobs, 3)
    clipped, _ = clip_to_one(normalize_volume(inst))
    assert check_properties(clipped, "vsall").passed


def test_unrelated_rejected():
    with pytest.raises(ValueError):
        normalize_volume(Instance.unrelated([[[1.0], [FORBIDDEN]]]))
