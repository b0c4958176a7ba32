import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from strategies import identical_instances, loads, unrelated_instances
from vecsched import (FORBIDDEN, MAKESPAN, AllForbidden, AssignedForbidden, Assignment, Instance,
                      InvalidExponent, LoadMatrix, NormSpec, all_norms_report, load_matrix, lr_norm)


def test_single_job_load_matrix():
    inst = Instance.identical([[2, 3]], m=2)
    assert load_matrix(inst, [0]).loads.tolist() == [[2, 3], [0, 0]]


def test_empty_assignment_is_zero():
    inst = Instance.identical([[2, 3]], m=2)
    assert not load_matrix(inst, []).loads.any()


def test_loads_add_up():
    inst = Instance.identical([[1], [1], [1]], m=2)
    assert load_matrix(inst, [0, 0, 0]).loads[0, 0] == 3


@pytest.mark.parametrize("col,r,want", [([3, 4], 2, 5.0), ([7, 2], MAKESPAN, 7.0), ([1, 1, 1, 1], 1, 4.0)])
def test_lr_norm_examples(col, r, want):
    assert lr_norm(np.array(col, dtype=float)[:, None], 0, r) == pytest.approx(want, rel=1e-15)


def test_all_norms_report_examples():
    assert all_norms_report(np.array([[3.0], [4.0]]), [1, 2, MAKESPAN]) == [[7.0, 5.0, 4.0]]
    assert all_norms_report(np.zeros((3, 2)), [1, MAKESPAN]) == [[0.0, 0.0], [0.0, 0.0]]
    twin = np.array([[1.0, 1.0], [2.0, 2.0]])
    rows = all_norms_report(twin, [1, 2, MAKESPAN])
    assert rows[0] == rows[1]
    with pytest.raises(ValueError):
        all_norms_report(twin, [])


def test_exponent_validation():
    with pytest.raises(InvalidExponent):
        lr_norm(np.ones((2, 1)), 0, 0.5)
    spec = NormSpec((1, 3), np.ones(2))
    spec.validate(8)
    with pytest.raises(InvalidExponent):
        spec.validate(4)
    NormSpec((MAKESPAN,), np.ones(1)).validate(1)


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance.identical([[-1.0]], m=1)
    with pytest.raises(ValueError):
        Instance.identical([[FORBIDDEN]], m=1)
    with pytest.raises(AllForbidden):
        Instance.unrelated([[[FORBIDDEN], [FORBIDDEN]]])
    with pytest.raises(ValueError):
        Instance("identical", 2, 1, np.array([[1.0]]), volume=np.array([2.0]))
    inst = Instance.identical([[0.1], [0.2]], m=1)
    assert inst.volume[0] == 0.1 + 0.2 and inst.max_load == 0.2
    assert inst.jobs.flags.writeable is False


def test_forbidden_assignment_raises():
    inst = Instance.unrelated([[[1.0], [FORBIDDEN]]])
    with pytest.raises(AssignedForbidden):
        load_matrix(inst, [1])
    assert load_matrix(inst, [0]).loads[0, 0] == 1.0


def test_assignment_equality():
    assert Assignment([0, 1]) == Assignment([0, 1])
    assert Assignment([0, 1], [1, 2]) != Assignment([0, 1], [1, 1])
    assert Assignment([0, 1]) != Assignment([0, 1], [1, 1])


columns = arrays(np.float64, st.tuples(st.integers(1, 6), st.just(1)), elements=loads)
exponents = st.one_of(st.integers(1, 8), st.floats(1.0, 10.0))


@given(columns, exponents)
def test_norm_between_max_and_scaled_max(col, r):
    m = col.shape[0]
    top = lr_norm(col, 0, MAKESPAN)
    value = lr_norm(col, 0, r)
    assert top * (1 - 1e-12) <= value <= m ** (1 / r) * top * (1 + 1e-12)
    assert lr_norm(col, 0, 1) == pytest.approx(col.sum(), rel=1e-12, abs=1e-12)


@given(columns, exponents, st.integers(0, 5), st.floats(0.0, 10.0))
def test_norm_monotone_in_entries(col, r, where, bump):
    bigger = col.copy()
    bigger[where % col.shape[0], 0] += bump
    assert lr_norm(bigger, 0, r) >= lr_norm(col, 0, r) * (1 - 1e-12)


@given(identical_instances(min_n=1), st.data())
def test_load_matrix_ignores_job_order(inst, data):
    machines = data.draw(st.lists(st.integers(0, inst.m - 1), min_size=inst.n, max_size=inst.n))
    perm = data.draw(st.permutations(range(inst.n)))
    shuffled = Instance.identical(inst.jobs[list(perm)], inst.m, inst.d)
    a = load_matrix(inst, machines).loads
    b = load_matrix(shuffled, [machines[j] for j in perm]).loads
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-9)


@given(unrelated_instances(), st.data())
def test_unrelated_loads_use_machine_rows(inst, data):
    machines = []
    for j in range(inst.n):
        ok = np.flatnonzero(~np.isinf(inst.jobs[j, :, 0]))
        machines.append(int(data.draw(st.sampled_from(list(ok)))))
    lm = load_matrix(inst, machines)
    want = np.zeros((inst.m, inst.d))
    for j, i in enumerate(machines):
        want[i] += inst.jobs[j, i]
    np.testing.assert_array_equal(lm.loads, want)
    assert lm.counts.sum() == inst.n


def test_load_matrix_sum():
    a, b = LoadMatrix(2, 1), LoadMatrix(2, 1)
    a.add(0, [1.0])
    b.add(0, [2.0])
    assert (a + b).loads[0, 0] == 3.0 and (a + b).counts[0] == 2
    assert math.isclose((a + b).norm(0, 2), 3.0)
