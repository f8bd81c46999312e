import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_polar, shift_register_encode
from pacstack.code import DEFAULT_CONN_POLY, PacCodeSpec, rm_rate_profile
from pacstack.precoder import conv_decode, conv_encode, conv_inv_step, conv_step, pac_encode, zero_state

POLY = DEFAULT_CONN_POLY
polys = st.integers(1, 8).flatmap(
    lambda m: st.lists(st.integers(0, 1), min_size=m - 1, max_size=m - 1)
).map(lambda mid: (1, *mid, 1))


def test_zero_fixed_point():
    assert conv_step(0, zero_state(POLY), POLY) == (0, zero_state(POLY))


def test_first_bit_is_c0():
    u, st_ = conv_step(1, zero_state(POLY), POLY)
    assert u == 1 and st_[0] == 1 and sum(st_) == 1


def test_impulse_response():
    v = np.zeros(16, dtype=np.uint8)
    v[0] = 1
    u, _ = conv_encode(v, POLY)
    assert u[:11].tolist() == [1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1]
    assert not u[11:].any()
    back, _ = conv_decode(u, POLY)
    assert np.array_equal(back, v)


def test_inverse_step_zero():
    assert conv_inv_step(0, zero_state(POLY), POLY) == (0, zero_state(POLY))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 1), st.lists(st.integers(0, 1), min_size=10, max_size=10))
def test_step_inverse(v, state):
    state = tuple(state)
    u, s1 = conv_step(v, state, POLY)
    assert conv_inv_step(u, state, POLY) == (v, s1)


@settings(max_examples=100, deadline=None)
@given(polys, st.lists(st.integers(0, 1), min_size=1, max_size=64))
def test_matches_convolution_and_round_trips(poly, v):
    u, end = conv_encode(v, poly)
    assert np.array_equal(u, shift_register_encode(v, poly))
    back, end2 = conv_decode(u, poly)
    assert back.tolist() == v and end == end2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=32, max_size=32),
       st.lists(st.integers(0, 1), min_size=32, max_size=32))
def test_linearity(a, b):
    a, b = np.array(a, dtype=np.uint8), np.array(b, dtype=np.uint8)
    ua, _ = conv_encode(a, POLY)
    ub, _ = conv_encode(b, POLY)
    uab, _ = conv_encode(a ^ b, POLY)
    assert np.array_equal(uab, ua ^ ub)


def test_encode_resumes_from_state():
    rng = np.random.default_rng(3)
    v = rng.integers(0, 2, 40, dtype=np.uint8)
    whole, end = conv_encode(v, POLY)
    first, mid = conv_encode(v[:17], POLY)
    second, end2 = conv_encode(v[17:], POLY, mid)
    assert np.array_equal(whole, np.concatenate([first, second])) and end == end2


class TestPacEncode:
    def test_all_zero(self):
        spec = PacCodeSpec.reed_muller(6, 57)
        assert not pac_encode(np.zeros(57, dtype=np.uint8), spec).any()

    def test_two_bit_code(self):
        spec = PacCodeSpec(1, np.array([1, 1], dtype=np.uint8), (1,))
        assert pac_encode([0, 1], spec).tolist() == [1, 1]

    def test_dense_matrix_oracle(self):
        spec = PacCodeSpec.reed_muller(6, 57)
        rng = np.random.default_rng(11)
        for _ in range(20):
            d = rng.integers(0, 2, 57, dtype=np.uint8)
            v = np.zeros(64, dtype=np.uint8)
            v[spec.rate_profile == 1] = d
            u = shift_register_encode(v, POLY)
            assert np.array_equal(pac_encode(d, spec), dense_polar(u))

    def test_wrong_length(self):
        spec = PacCodeSpec(3, rm_rate_profile(3, 4))
        with pytest.raises(ValueError):
            pac_encode([1, 0, 1], spec)
