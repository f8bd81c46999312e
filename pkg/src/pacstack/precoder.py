"""Rate-1 convolutional precoder v -> u with an explicit shift register.

The register is a tuple of length m = deg c(t); element 0 holds the most
recent input bit.
"""

from __future__ import annotations

import numpy as np

from .polar import polar_transform


def zero_state(conn_poly) -> tuple:
    return (0,) * (len(conn_poly) - 1)


def _taps(conn_poly):
    return [j - 1 for j in range(1, len(conn_poly)) if conn_poly[j]]


def _parity(state, taps) -> int:
    acc = 0
    for j in taps:
        acc ^= state[j]
    return acc


def conv_step(v_bit: int, state: tuple, conn_poly) -> tuple[int, tuple]:
    """Encode one bit: ``u = c_0 v + sum_j c_j state[j-1]`` over GF(2)."""
    if len(state) != len(conn_poly) - 1:
        raise ValueError("state length must equal the polynomial degree")
    u = (conn_poly[0] & v_bit) ^ _parity(state, _taps(conn_poly))
    return u, (v_bit,) + state[:-1] if state else ()


def conv_inv_step(u_bit: int, state: tuple, conn_poly) -> tuple[int, tuple]:
    """Invert :func:`conv_step`; requires ``c_0 = 1``."""
    if conn_poly[0] != 1:
        raise ValueError("inverse needs c_0 = 1")
    v = u_bit ^ _parity(state, _taps(conn_poly))
    return v, (v,) + state[:-1] if state else ()


def conv_encode(v, conn_poly, state=None) -> tuple[np.ndarray, tuple]:
    """Run the precoder over a whole block. Returns ``(u, end_state)``."""
    taps = _taps(conn_poly)
    st = zero_state(conn_poly) if state is None else tuple(state)
    u = np.empty(len(v), dtype=np.uint8)
    for k, bit in enumerate(v):
        bit = int(bit)
        u[k] = bit ^ _parity(st, taps)
        if st:
            st = (bit,) + st[:-1]
    return u, st


def conv_decode(u, conn_poly, state=None) -> tuple[np.ndarray, tuple]:
    """Inverse of :func:`conv_encode`."""
    taps = _taps(conn_poly)
    st = zero_state(conn_poly) if state is None else tuple(state)
    v = np.empty(len(u), dtype=np.uint8)
    for k, bit in enumerate(u):
        vk = int(bit) ^ _parity(st, taps)
        v[k] = vk
        if st:
            st = (vk,) + st[:-1]
    return v, st


def pac_encode(data, spec) -> np.ndarray:
    """Encode K data bits into a length-N PAC codeword."""
    data = np.asarray(data, dtype=np.uint8)
    if data.shape != (spec.K,):
        raise ValueError(f"expected {spec.K} data bits, got shape {data.shape}")
    v = np.zeros(spec.N, dtype=np.uint8)
    v[spec.info_indices] = data
    u, _ = conv_encode(v, spec.conn_poly)
    return polar_transform(u)
