import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import SortedListDepq
from pacstack.depq import BoundedDepq, PathEntry


def test_single_insert():
    q = BoundedDepq(4)
    q.insert(1.5, "a")
    assert len(q) == 1 and q.peek_max() == (1.5, "a") and q.peek_min() == (1.5, "a")


def test_full_insert_evicts_min():
    q = BoundedDepq(2)
    q.insert(5, "x")
    q.insert(3, "y")
    assert q.insert(4, "z") == "y"
    assert sorted(m for m, _ in q.items()) == [4, 5]


def test_new_minimum_still_replaces():
    q = BoundedDepq(2)
    q.insert(5, "x")
    q.insert(3, "y")
    assert q.insert(1, "z") == "y"
    assert q.peek_min() == (1, "z")


def test_extractions():
    q = BoundedDepq(8)
    q.insert(1, "lo")
    q.insert(2, "hi")
    assert q.extract_max() == (2, "hi")
    assert q.extract_min() == (1, "lo")
    assert not q
    with pytest.raises(IndexError):
        q.extract_max()
    with pytest.raises(IndexError):
        q.extract_min()


def test_ties():
    q = BoundedDepq(8)
    for name in "abcd":
        q.insert(0.0, name)
    assert q.extract_max()[1] == "a"
    assert q.extract_min()[1] == "d"


def test_path_entry_seq():
    q = BoundedDepq(3)
    entries = [PathEntry(float(k), np.zeros(k, dtype=np.uint8), (), None, None) for k in range(3)]
    for e in entries:
        q.insert(e.metric, e)
    assert [e.seq for e in entries] == [0, 1, 2]
    assert len(q.peek_max()[1]) == 2


def test_zero_capacity():
    with pytest.raises(ValueError):
        BoundedDepq(0)


ops = st.lists(st.tuples(st.sampled_from(["ins", "ins", "max", "min"]),
                         st.integers(-20, 20)), max_size=300)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 12), ops)
def test_matches_sorted_list(capacity, script):
    q, ref = BoundedDepq(capacity), SortedListDepq(capacity)
    for k, (op, metric) in enumerate(script):
        if op == "ins":
            assert q.insert(float(metric), k) == ref.insert(float(metric), k)
        elif len(ref):
            fn = "extract_max" if op == "max" else "extract_min"
            assert getattr(q, fn)() == getattr(ref, fn)()
        assert len(q) == len(ref) <= capacity


def test_long_fuzz_and_logarithmic_work():
    rng = np.random.default_rng(2)
    capacity = 256
    q, ref = BoundedDepq(capacity), SortedListDepq(capacity)
    steps = 10 ** 5
    for k in range(steps):
        r = rng.random()
        if r < 0.6 or not len(ref):
            m = float(rng.integers(-500, 500))
            assert q.insert(m, k) == ref.insert(m, k)
        elif r < 0.8:
            assert q.extract_max() == ref.extract_max()
        else:
            assert q.extract_min() == ref.extract_min()
    # each operation sifts along at most two root-to-leaf paths
    assert q.sift_steps <= 2 * steps * math.ceil(math.log2(capacity))
