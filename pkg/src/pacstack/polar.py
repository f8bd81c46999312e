"""Polar transform, LLR combining and the single-sweep LLR update.

Intermediate LLRs live in one buffer of length N-1. The block of stage s
(a node with 2**s leaves) starts at offset ``N - 2**(s+1)``; stage n-1 sits
at the front and stage 0 is the last entry. LLRs are natural-log ratios.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .code import SPECIAL_TYPES, NodeType, classify_count

LLR_MAX = 40.0


def polar_transform(u) -> np.ndarray:
    """Compute ``u F^{(x)n}`` over GF(2) with F = [[1, 0], [1, 1]]."""
    x = np.array(u, dtype=np.uint8)
    N = x.size
    if N == 0 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N}")
    half = 1
    while half < N:
        x = x.reshape(-1, 2 * half)
        x[:, :half] ^= x[:, half:]
        half *= 2
    return x.reshape(N)


def f_combine(a, b):
    """Exact boxplus ``2 atanh(tanh(a/2) tanh(b/2))``.

    Evaluated as ``log(1 + e^(a+b)) - log(e^a + e^b)`` which stays finite for
    large magnitudes.
    """
    out = np.logaddexp(0.0, np.add(a, b)) - np.logaddexp(a, b)
    return np.clip(out, -LLR_MAX, LLR_MAX)


def g_combine(a, b, u):
    """``a (-1)^u + b``."""
    sign = 1.0 - 2.0 * np.asarray(u, dtype=np.float64)
    return np.clip(np.multiply(a, sign) + b, -LLR_MAX, LLR_MAX)


def ffs(i: int) -> int:
    """Zero-based position of the lowest set bit of ``i``."""
    if i <= 0:
        raise ValueError("ffs is defined for positive integers")
    return (i & -i).bit_length() - 1


def stage_offset(N: int, s: int) -> int:
    return N - (2 << s)


class UpdateResult(NamedTuple):
    llr_start: int
    """Offset of the refreshed stage block inside the buffer."""
    node_type: NodeType
    chunk_start: int
    chunk_size: int
    fg_ops: int

    @property
    def llr_slice(self) -> slice:
        return slice(self.llr_start, self.llr_start + self.chunk_size)

    @property
    def chunk(self) -> range:
        return range(self.chunk_start, self.chunk_start + self.chunk_size)


def update_llr(channel_llrs, L, i, u, n, s_values, allowed_types=SPECIAL_TYPES,
               max_chunk_size=None) -> UpdateResult:
    """Refresh the LLR buffer ``L`` in place for the path whose first ``i``
    precoder outputs ``u[:i]`` are fixed.

    The sweep starts at stage n-1 (``i == 0``, f first) or at ``ffs(i)``
    (g first, with partial sums from the trailing ``2**s`` bits of ``u``) and
    moves towards the leaves with f until the segment containing leaf ``i``
    is a special node. Every block f/g application counts as one operation.
    """
    N = 1 << n
    if i == 0:
        s, use_f = n - 1, True
    else:
        s, use_f = ffs(i), False
    ops = 0
    while True:
        size = 1 << s
        out = N - 2 * size
        if s == n - 1:
            left = channel_llrs[:size]
            right = channel_llrs[size:2 * size]
        else:
            src = N - 4 * size
            left = L[src:src + size]
            right = L[src + size:src + 2 * size]
        if use_f:
            L[out:out + size] = f_combine(left, right)
        else:
            L[out:out + size] = g_combine(left, right, polar_transform(u[i - size:i]))
        ops += 1
        use_f = True

        level = n - s
        idx = i >> s
        chunk_type = classify_count(int(s_values[level][idx]), size,
                                    () if max_chunk_size is not None and size > max_chunk_size
                                    else allowed_types)
        if chunk_type is not NodeType.NOT_SPECIAL:
            return UpdateResult(out, chunk_type, idx * size, size, ops)
        s -= 1
