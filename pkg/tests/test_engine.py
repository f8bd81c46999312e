import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pacstack import engine
from pacstack.code import SPECIAL_TYPES, NodeType, PacCodeSpec
from pacstack.construction import build_tables
from pacstack.decoders import DecodeOptions, fast_stack_decode, stack_decode
from pacstack.precoder import pac_encode


def noisy(spec, ebn0, rng):
    sigma = math.sqrt(1 / (2 * spec.rate * 10 ** (ebn0 / 10)))
    x = pac_encode(rng.integers(0, 2, spec.K, dtype=np.uint8), spec)
    return sigma, 2 * ((1 - 2.0 * x) + sigma * rng.standard_normal(spec.N)) / sigma ** 2


@pytest.mark.parametrize("n,K,ebn0,p_th", [(6, 57, 4.0, 1e-2), (7, 99, 2.0, 1e-3),
                                           (7, 64, 1.0, 2e-2), (5, 16, 0.0, None)])
@pytest.mark.parametrize("bitwise", [False, True])
def test_matches_python(n, K, ebn0, p_th, bitwise):
    spec = PacCodeSpec.reed_muller(n, K)
    rng = np.random.default_rng(n + K)
    python = stack_decode if bitwise else fast_stack_decode
    for _ in range(40):
        sigma, llr = noisy(spec, ebn0, rng)
        tab = build_tables(sigma, n, p_th or 0.5)
        opts = DecodeOptions(16, 300, None if p_th is None else tab.gamma_T)
        assert engine.decode(spec, tab, llr, opts, bitwise).as_dict() == \
            python(spec, tab, llr, opts).as_dict()


subsets = st.sets(st.sampled_from(sorted(SPECIAL_TYPES, key=str))).map(frozenset)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1), subsets,
       st.sampled_from([None, 1, 2, 4, 8]), st.integers(1, 12), st.booleans())
def test_matches_python_random_profiles(n, seed, allowed, max_chunk, capacity, prune):
    rng = np.random.default_rng(seed)
    prof = rng.integers(0, 2, 1 << n).astype(np.uint8)
    spec = PacCodeSpec(n, prof)
    sigma, llr = noisy(spec, 1.0, rng) if spec.K else (1.0, rng.normal(1, 1, spec.N))
    tab = build_tables(sigma, n, 1e-2)
    opts = DecodeOptions(capacity, 3 << n, tab.gamma_T if prune else None, allowed, max_chunk)
    assert engine.decode(spec, tab, llr, opts).as_dict() == \
        fast_stack_decode(spec, tab, llr, opts).as_dict()
    assert engine.decode(spec, tab, llr, opts, bitwise=True).as_dict() == \
        stack_decode(spec, tab, llr, opts).as_dict()


def test_custom_polynomial():
    spec = PacCodeSpec.reed_muller(6, 32, conn_poly=(1, 1, 0, 1))
    rng = np.random.default_rng(3)
    sigma, llr = noisy(spec, 2.0, rng)
    tab = build_tables(sigma, 6, 1e-2)
    opts = DecodeOptions(thresholds=tab.gamma_T)
    assert engine.decode(spec, tab, llr, opts).as_dict() == \
        fast_stack_decode(spec, tab, llr, opts).as_dict()


def test_rate0_only_types():
    spec = PacCodeSpec.reed_muller(6, 40)
    sigma, llr = noisy(spec, 3.0, np.random.default_rng(4))
    tab = build_tables(sigma, 6, 1e-2)
    opts = DecodeOptions(allowed_types=frozenset({NodeType.RATE0}))
    assert engine.decode(spec, tab, llr, opts).as_dict() == \
        fast_stack_decode(spec, tab, llr, opts).as_dict()


def test_errors():
    spec = PacCodeSpec.reed_muller(4, 8)
    tab = build_tables(1.0, 4, 1e-2)
    with pytest.raises(ValueError):
        engine.decode(spec, tab, np.zeros(8))
    long_poly = PacCodeSpec(4, spec.rate_profile, conn_poly=(1,) + (0,) * 62 + (1,))
    with pytest.raises(ValueError):
        engine.decode(long_poly, tab, np.zeros(16))
