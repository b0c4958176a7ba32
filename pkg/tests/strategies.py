"""Hypothesis strategies for small instances."""
import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vecsched import FORBIDDEN, Instance

loads = st.floats(min_value=0.0, max_value=100.0, allow_nan=False, allow_subnormal=False)


@st.composite
def identical_instances(draw, max_m=5, max_d=5, max_n=12, min_n=0):
    m = draw(st.integers(1, max_m))
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(min_n, max_n))
    jobs = draw(arrays(np.float64, (n, d), elements=loads))
    return Instance.identical(jobs, m, d)


@st.composite
def unrelated_instances(draw, max_m=4, max_d=3, max_n=8):
    m = draw(st.integers(1, max_m))
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(0, max_n))
    jobs = draw(arrays(np.float64, (n, m, d), elements=loads))
    forbid = draw(arrays(np.bool_, (n, m)))
    keep = draw(arrays(np.int64, (n,), elements=st.integers(0, m - 1)))
    forbid[np.arange(n), keep] = False
    jobs[forbid] = FORBIDDEN
    return Instance.unrelated(jobs, m, d)
