"""Compiled decoding engine.

Same algorithms, ordering rules and counters as :mod:`pacstack.decoders`,
compiled with numba for Monte-Carlo runs. Paths live in a fixed pool of
slots (metric, insertion number, v, register, LLR buffer, u); the stack is
an interval heap of slot numbers. The register is an integer whose bit k
is ``state[k]``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .code import NodeType
from .decoders import DecodeOptions, DecodeResult, DecodeStatus
from .polar import LLR_MAX

_TYPE_CODE = {NodeType.RATE0: 0, NodeType.REP: 1, NodeType.TYPE_IV: 2, NodeType.RATE1: 3}
_LN2 = math.log(2.0)

# -- ordering and the interval heap over slot numbers -------------------------


@njit(cache=True, inline="always")
def _less(a, b, metric, seq):
    ma = metric[a]
    mb = metric[b]
    return ma < mb or (ma == mb and seq[a] > seq[b])


@njit(cache=True)
def _heap_push(h, size, slot, metric, seq):
    pos = size
    h[pos] = slot
    size += 1
    if pos == 0:
        return size
    if pos & 1:
        if _less(slot, h[pos - 1], metric, seq):
            h[pos] = h[pos - 1]
            h[pos - 1] = slot
            _sift_up_min(h, pos - 1, metric, seq)
        else:
            _sift_up_max(h, pos, metric, seq)
        return size
    parent = (pos // 2 - 1) // 2
    if _less(slot, h[2 * parent], metric, seq):
        _sift_up_min(h, pos, metric, seq)
    elif _less(h[2 * parent + 1], slot, metric, seq):
        _sift_up_max(h, pos, metric, seq)
    return size


@njit(cache=True)
def _sift_up_min(h, pos, metric, seq):
    e = h[pos]
    node = pos // 2
    while node > 0:
        parent = (node - 1) // 2
        p = 2 * parent
        if not _less(e, h[p], metric, seq):
            break
        h[pos] = h[p]
        pos = p
        node = parent
    h[pos] = e


@njit(cache=True)
def _sift_up_max(h, pos, metric, seq):
    e = h[pos]
    node = pos // 2
    while node > 0:
        parent = (node - 1) // 2
        p = 2 * parent + 1
        if not _less(h[p], e, metric, seq):
            break
        h[pos] = h[p]
        pos = p
        node = parent
    h[pos] = e


@njit(cache=True)
def _heap_pop_min(h, size, metric, seq):
    out = h[0]
    size -= 1
    if size == 0:
        return out, size
    h[0] = h[size]
    pos = 0
    while True:
        if pos + 1 < size and _less(h[pos + 1], h[pos], metric, seq):
            t = h[pos]
            h[pos] = h[pos + 1]
            h[pos + 1] = t
        c = 4 * (pos // 2) + 2
        if c >= size:
            break
        if c + 2 < size and _less(h[c + 2], h[c], metric, seq):
            c += 2
        if _less(h[c], h[pos], metric, seq):
            t = h[pos]
            h[pos] = h[c]
            h[c] = t
            pos = c
        else:
            break
    return out, size


@njit(cache=True)
def _heap_pop_max(h, size, metric, seq):
    if size <= 2:
        size -= 1
        return h[size], size
    out = h[1]
    size -= 1
    h[1] = h[size]
    pos = 1
    while True:
        if _less(h[pos], h[pos - 1], metric, seq):
            t = h[pos]
            h[pos] = h[pos - 1]
            h[pos - 1] = t
        node = pos // 2
        best = -1
        for child in (2 * node + 1, 2 * node + 2):
            lo = 2 * child
            if lo >= size:
                break
            cand = lo + 1 if lo + 1 < size else lo
            if best < 0 or _less(h[best], h[cand], metric, seq):
                best = cand
        if best < 0 or not _less(h[pos], h[best], metric, seq):
            break
        t = h[pos]
        h[pos] = h[best]
        h[best] = t
        if best & 1 == 0:
            break
        pos = best
    return out, size


@njit(cache=True)
def _heap_top(h, size):
    return h[1] if size > 1 else h[0]


# -- kernels ------------------------------------------------------------------


@njit(cache=True, inline="always")
def _f(a, b):
    # log(1 + e^(a+b)) - log(e^a + e^b)
    out = np.logaddexp(0.0, a + b) - np.logaddexp(a, b)
    return min(max(out, -LLR_MAX), LLR_MAX)


@njit(cache=True, inline="always")
def _g(a, b, bit):
    out = b - a if bit else a + b
    return min(max(out, -LLR_MAX), LLR_MAX)


@njit(cache=True, inline="always")
def _metric(llr, bit, bias):
    llr = min(max(llr, -LLR_MAX), LLR_MAX)
    z = llr if bit else -llr
    return 1.0 - np.logaddexp(0.0, z) / _LN2 - bias


@njit(cache=True)
def _polar(bits, out, size):
    for k in range(size):
        out[k] = bits[k]
    half = 1
    while half < size:
        for blk in range(0, size, 2 * half):
            for k in range(blk, blk + half):
                out[k] ^= out[k + half]
        half *= 2


@njit(cache=True, inline="always")
def _parity(x):
    p = 0
    while x:
        p ^= 1
        x &= x - 1
    return p


@njit(cache=True)
def _classify(count, size, allowed, max_chunk):
    if size > max_chunk:
        allowed = 0
    # precedence: rate-1, rate-0, REP, type-IV
    first = -1
    if count == size:
        if allowed & 8:
            return 3
        first = 3
    if count == 0:
        if allowed & 1:
            return 0
        if first < 0:
            first = 0
    if count == 1:
        if allowed & 2:
            return 1
        if first < 0:
            first = 1
    if count == 2 and size >= 2:
        if allowed & 4:
            return 2
    if size == 1:
        return first
    return -1


@njit(cache=True)
def _update_llr(ch, L, i, u, n, s_flat, allowed, max_chunk, scratch):
    N = 1 << n
    if i == 0:
        s = n - 1
        use_f = True
    else:
        s = 0
        while not (i >> s) & 1:
            s += 1
        use_f = False
    ops = 0
    while True:
        size = 1 << s
        out = N - 2 * size
        if not use_f:
            _polar(u[i - size:i], scratch, size)
        if s == n - 1:
            for k in range(size):
                if use_f:
                    L[out + k] = _f(ch[k], ch[size + k])
                else:
                    L[out + k] = _g(ch[k], ch[size + k], scratch[k])
        else:
            src = N - 4 * size
            for k in range(size):
                if use_f:
                    L[out + k] = _f(L[src + k], L[src + size + k])
                else:
                    L[out + k] = _g(L[src + k], L[src + size + k], scratch[k])
        ops += 1
        use_f = True
        level = n - s
        idx = i >> s
        t = _classify(s_flat[(1 << level) - 1 + idx], size, allowed, max_chunk)
        if t >= 0:
            return out, t, idx * size, size, ops
        s -= 1


# -- the decoder --------------------------------------------------------------


@njit(cache=True)
def _decode(ch, profile, taps, mem, n, E0, gamma, s_flat, cap, max_cycles, allowed, max_chunk,
            bitwise):
    N = 1 << n
    nslots = cap + 4
    metric = np.zeros(nslots)
    seq = np.zeros(nslots, dtype=np.int64)
    vlen = np.zeros(nslots, dtype=np.int64)
    V = np.zeros((nslots, N), dtype=np.uint8)
    ST = np.zeros(nslots, dtype=np.int64)
    LL = np.zeros((nslots, max(N - 1, 1)))
    U = np.zeros((nslots, N), dtype=np.uint8)
    free = np.empty(nslots, dtype=np.int64)
    for k in range(nslots):
        free[k] = nslots - 1 - k
    nfree = nslots
    heap = np.empty(nslots, dtype=np.int64)
    hsize = 0
    next_seq = 0
    statemask = (1 << mem) - 1

    # rate-1 frontier / completed stores
    a_metric = np.zeros(nslots)
    a_seq = np.zeros(nslots, dtype=np.int64)
    a_len = np.zeros(nslots, dtype=np.int64)
    a_bits = np.zeros((nslots, N), dtype=np.uint8)
    a_heap = np.empty(nslots, dtype=np.int64)
    a_free = np.empty(nslots, dtype=np.int64)
    c_metric = np.zeros(nslots)
    c_seq = np.zeros(nslots, dtype=np.int64)
    c_bits = np.zeros((nslots, N), dtype=np.uint8)
    c_heap = np.empty(nslots, dtype=np.int64)
    c_free = np.empty(nslots, dtype=np.int64)

    scratch = np.zeros(N, dtype=np.uint8)
    xbuf = np.zeros(N, dtype=np.uint8)
    ubuf = np.zeros((4, N), dtype=np.uint8)
    vbuf = np.zeros((4, N), dtype=np.uint8)
    stc = np.zeros(4, dtype=np.int64)
    mvec = np.zeros(N)
    m0 = np.zeros(N)
    m1 = np.zeros(N)
    cand_m = np.zeros(4)
    cand_ok = np.zeros(4, dtype=np.bool_)

    # root
    nfree -= 1
    root = free[nfree]
    metric[root] = 0.0
    seq[root] = next_seq
    next_seq += 1
    hsize = _heap_push(heap, hsize, root, metric, seq)

    fg_ops = 0
    insertions = 0
    cycles = 0
    status = 0  # 0 decoded, 1 cycle limit, 2 stack exhausted
    while True:
        if cycles == max_cycles:
            status = 1
            break
        cycles += 1
        top, hsize = _heap_pop_max(heap, hsize, metric, seq)
        i = vlen[top]
        Ltop = LL[top]
        utop = U[top]
        st0 = ST[top]
        if bitwise:
            out, t, start, size, ops = _update_llr(ch, Ltop, i, utop, n, s_flat, 0, 1, scratch)
        else:
            out, t, start, size, ops = _update_llr(ch, Ltop, i, utop, n, s_flat, allowed,
                                                   max_chunk, scratch)
        fg_ops += ops
        base = metric[top]
        nc = 0
        if bitwise:
            # one bit: candidates ordered by u value, then sorted best first
            r = Ltop[out]
            par = _parity(st0 & taps)
            if profile[i]:
                for ub in range(2):
                    mb = _metric(r, ub, E0[i])
                    if mb > gamma[i]:
                        cand_m[nc] = mb
                        ubuf[nc, 0] = ub
                        vbuf[nc, 0] = ub ^ par
                        nc += 1
                if nc == 2 and cand_m[1] > cand_m[0]:
                    cand_m[0], cand_m[1] = cand_m[1], cand_m[0]
                    for row in (ubuf, vbuf):
                        tmp = row[0, 0]
                        row[0, 0] = row[1, 0]
                        row[1, 0] = tmp
            else:
                cand_m[0] = _metric(r, par, E0[i])
                ubuf[0, 0] = par
                vbuf[0, 0] = 0
                nc = 1
            for c in range(nc):
                stc[c] = ((st0 << 1) | vbuf[c, 0]) & statemask
                cand_m[c] = base + cand_m[c]
            size = 1
        elif t == 3:
            # rate-1: best-first search over node-level words
            for k in range(size):
                m0[k] = _metric(Ltop[out + k], 0, E0[start + k])
                m1[k] = _metric(Ltop[out + k], 1, E0[start + k])
            for k in range(nslots):
                a_free[k] = nslots - 1 - k
                c_free[k] = nslots - 1 - k
            na_free = nslots
            nc_free = nslots
            a_size = 0
            c_size = 0
            a_next = 0
            c_next = 0
            na_free -= 1
            s0 = a_free[na_free]
            a_metric[s0] = base
            a_seq[s0] = a_next
            a_next += 1
            a_len[s0] = 0
            a_size = _heap_push(a_heap, a_size, s0, a_metric, a_seq)
            count = 1
            total = 1 << size
            while count < total and a_size > 0:
                at, a_size = _heap_pop_max(a_heap, a_size, a_metric, a_seq)
                pos = a_len[at]
                for b in range(2):
                    mb = m0[pos] if b == 0 else m1[pos]
                    if mb > gamma[start + pos]:
                        if pos + 1 < size:
                            if a_size == cap:
                                ev, a_size = _heap_pop_min(a_heap, a_size, a_metric, a_seq)
                                a_free[na_free] = ev
                                na_free += 1
                            na_free -= 1
                            sl = a_free[na_free]
                            a_metric[sl] = a_metric[at] + mb
                            a_seq[sl] = a_next
                            a_next += 1
                            a_len[sl] = pos + 1
                            for k in range(pos):
                                a_bits[sl, k] = a_bits[at, k]
                            a_bits[sl, pos] = b
                            a_size = _heap_push(a_heap, a_size, sl, a_metric, a_seq)
                        else:
                            if c_size == cap:
                                ev, c_size = _heap_pop_min(c_heap, c_size, c_metric, c_seq)
                                c_free[nc_free] = ev
                                nc_free += 1
                            nc_free -= 1
                            sl = c_free[nc_free]
                            c_metric[sl] = a_metric[at] + mb
                            c_seq[sl] = c_next
                            c_next += 1
                            for k in range(pos):
                                c_bits[sl, k] = a_bits[at, k]
                            c_bits[sl, pos] = b
                            c_size = _heap_push(c_heap, c_size, sl, c_metric, c_seq)
                            count += 1
                    else:
                        count += 1 << (size - pos - 1)
                a_free[na_free] = at
                na_free += 1
            # completed words enter the main stack best first
            while c_size > 0:
                ct, c_size = _heap_pop_max(c_heap, c_size, c_metric, c_seq)
                _polar(c_bits[ct], xbuf, size)
                st = st0
                for k in range(size):
                    vk = xbuf[k] ^ _parity(st & taps)
                    st = ((st << 1) | vk) & statemask
                    ubuf[0, k] = xbuf[k]
                    vbuf[0, k] = vk
                if hsize == cap:
                    ev, hsize = _heap_pop_min(heap, hsize, metric, seq)
                    free[nfree] = ev
                    nfree += 1
                nfree -= 1
                sl = free[nfree]
                _store_child(sl, top, c_metric[ct], st, start, size, ubuf[0], vbuf[0],
                             metric, seq, next_seq, vlen, V, ST, LL, U)
                next_seq += 1
                insertions += 1
                hsize = _heap_push(heap, hsize, sl, metric, seq)
            nc = 0
        else:
            # rate-0 / REP / type-IV candidate sets
            p1 = -1
            p2 = -1
            for k in range(size):
                if profile[start + k]:
                    if p1 < 0:
                        p1 = k
                    else:
                        p2 = k
            if t == 0:
                ncand = 1
            elif t == 1:
                ncand = 2
            else:
                ncand = 4
            for c in range(ncand):
                for k in range(size):
                    vbuf[c, k] = 0
                if t == 1 and c == 1:
                    vbuf[c, p1] = 1
                elif t == 2:
                    if c == 1 or c == 3:
                        vbuf[c, p1] = 1
                    if c == 2 or c == 3:
                        vbuf[c, p2] = 1
                st = st0
                for k in range(size):
                    ubuf[c, k] = vbuf[c, k] ^ _parity(st & taps)
                    st = ((st << 1) | vbuf[c, k]) & statemask
                stc[c] = st
                _polar(ubuf[c], xbuf, size)
                # bit metrics then a pairwise sum, matching numpy's reduction
                for k in range(size):
                    mvec[k] = _metric(Ltop[out + k], xbuf[k], E0[start + k])
                total_m = _pairwise_sum(mvec, size)
                if t == 0:
                    ok = True
                elif t == 1:
                    ok = mvec[p1] > gamma[start + p1]
                else:
                    ok = mvec[p1] + mvec[p2] > gamma[start + p1] + gamma[start + p2]
                cand_ok[c] = ok
                cand_m[c] = base + total_m
            nc = 0
            for c in range(ncand):
                if cand_ok[c]:
                    if nc != c:
                        cand_m[nc] = cand_m[c]
                        stc[nc] = stc[c]
                        for k in range(size):
                            ubuf[nc, k] = ubuf[c, k]
                            vbuf[nc, k] = vbuf[c, k]
                    nc += 1
        for c in range(nc):
            if hsize == cap:
                ev, hsize = _heap_pop_min(heap, hsize, metric, seq)
                free[nfree] = ev
                nfree += 1
            nfree -= 1
            sl = free[nfree]
            _store_child(sl, top, cand_m[c], stc[c], start if not bitwise else i, size,
                         ubuf[c], vbuf[c], metric, seq, next_seq, vlen, V, ST, LL, U)
            next_seq += 1
            insertions += 1
            hsize = _heap_push(heap, hsize, sl, metric, seq)
        free[nfree] = top
        nfree += 1
        if hsize == 0:
            status = 2
            break
        best = _heap_top(heap, hsize)
        if vlen[best] == N:
            status = 0
            break

    if hsize == 0:
        return 2, -np.inf, np.zeros(0, dtype=np.uint8), cycles, 0, fg_ops, insertions
    best = _heap_top(heap, hsize)
    if vlen[best] == N:
        status = 0
    return (status, metric[best], V[best, :vlen[best]].copy(), cycles, hsize, fg_ops,
            insertions)


@njit(cache=True)
def _store_child(sl, top, m, st, start, size, ubits, vbits, metric, seq, next_seq, vlen, V, ST,
                 LL, U):
    metric[sl] = m
    seq[sl] = next_seq
    i = vlen[top]
    vlen[sl] = i + size
    V[sl, :i] = V[top, :i]
    V[sl, i:i + size] = vbits[:size]
    ST[sl] = st
    LL[sl, :] = LL[top, :]
    U[sl, :] = U[top, :]
    U[sl, start:start + size] = ubits[:size]


@njit(cache=True)
def _pairwise_sum(a, n):
    # numpy's float reduction: 8-way unrolled blocks below 128 elements
    if n < 8:
        res = 0.0
        for k in range(n):
            res += a[k]
        return res
    if n <= 128:
        r = np.empty(8)
        for k in range(8):
            r[k] = a[k]
        k = 8
        while k < n - (n % 8):
            for j in range(8):
                r[j] += a[k + j]
            k += 8
        res = ((r[0] + r[1]) + (r[2] + r[3])) + ((r[4] + r[5]) + (r[6] + r[7]))
        while k < n:
            res += a[k]
            k += 1
        return res
    half = n // 2
    half -= half % 8
    return _pairwise_sum(a, half) + _pairwise_sum(a[half:], n - half)


def _tapmask(conn_poly) -> int:
    return sum(1 << (j - 1) for j in range(1, len(conn_poly)) if conn_poly[j])


def decode(spec, tables, channel_llrs, options: DecodeOptions | None = None,
           bitwise: bool = False) -> DecodeResult:
    """Compiled counterpart of :func:`~pacstack.decoders.fast_stack_decode`
    (``bitwise=False``) and :func:`~pacstack.decoders.stack_decode`
    (``bitwise=True``)."""
    options = options or DecodeOptions()
    if spec.memory > 62:
        raise ValueError("compiled engine supports polynomials of degree <= 62")
    llrs = np.clip(np.asarray(channel_llrs, dtype=np.float64), -LLR_MAX, LLR_MAX)
    if llrs.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} channel LLRs, got shape {llrs.shape}")
    gamma = (np.full(spec.N, -np.inf) if options.thresholds is None
             else np.asarray(options.thresholds, dtype=np.float64))
    allowed = sum(1 << _TYPE_CODE[t] for t in options.allowed_types if t in _TYPE_CODE)
    max_chunk = spec.N if options.max_special_chunk_size is None else options.max_special_chunk_size
    status, metric, v, cycles, used, fg_ops, ins = _decode(
        llrs, np.ascontiguousarray(spec.rate_profile), _tapmask(spec.conn_poly), spec.memory,
        spec.n, np.ascontiguousarray(tables.E0, dtype=np.float64), gamma, _s_flat(spec),
        options.stack_capacity, options.max_cycles, allowed, max_chunk, bitwise)
    status = (DecodeStatus.DECODED, DecodeStatus.CYCLE_LIMIT, DecodeStatus.STACK_EXHAUSTED)[status]
    if status is DecodeStatus.STACK_EXHAUSTED:
        return DecodeResult(None, None, status, -math.inf, cycles, 0, fg_ops, ins)
    d_hat = v[spec.info_indices] if status is DecodeStatus.DECODED else None
    return DecodeResult(v, d_hat, status, float(metric), cycles, used, fg_ops, ins)


def _s_flat(spec):
    from .code import calculate_s_values

    return np.concatenate(calculate_s_values(spec.rate_profile)).astype(np.int64)
