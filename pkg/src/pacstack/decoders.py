"""Stack decoders for PAC codes.

``stack_decode`` is the bit-by-bit stack algorithm; with a threshold
vector it becomes the variance-pruned variant. ``fast_stack_decode``
processes whole special nodes (rate-0, REP, type-IV, rate-1) per cycle.

Path metrics are in bits. A child whose information-bit metric does not
exceed its threshold is dropped before it reaches the stack; frozen bits
are never pruned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .code import SPECIAL_TYPES, NodeType, calculate_s_values
from .depq import BoundedDepq, PathEntry
from .polar import LLR_MAX, polar_transform, update_llr
from .precoder import conv_decode, conv_encode, conv_step, zero_state

LN2 = math.log(2.0)


def bit_metric(llr, bit, bias):
    """``1 - log2(1 + exp(-llr (-1)^bit)) - bias`` with saturated LLRs."""
    llr = np.clip(np.asarray(llr, dtype=np.float64), -LLR_MAX, LLR_MAX)
    sign = 1.0 - 2.0 * np.asarray(bit, dtype=np.float64)
    return 1.0 - np.logaddexp(0.0, -llr * sign) / LN2 - bias


class DecodeStatus(str, enum.Enum):
    DECODED = "decoded"
    CYCLE_LIMIT = "cycle_limit"
    STACK_EXHAUSTED = "stack_exhausted"


@dataclass
class DecodeOptions:
    """Decoder knobs.

    ``thresholds`` is the per-position pruning vector in bits (``None``
    disables pruning). ``allowed_types`` and ``max_special_chunk_size``
    restrict which nodes the fast decoder treats as special; leaves are
    always processed.
    """

    stack_capacity: int = 64
    max_cycles: int = 1024
    thresholds: np.ndarray | None = None
    allowed_types: frozenset = SPECIAL_TYPES
    max_special_chunk_size: int | None = None

    def __post_init__(self):
        if self.stack_capacity < 1:
            raise ValueError("stack_capacity must be at least 1")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be at least 1")


@dataclass
class DecodeResult:
    v_hat: np.ndarray | None
    d_hat: np.ndarray | None
    status: DecodeStatus
    metric: float
    cycles: int
    stack_used: int
    fg_ops: int
    total_insertions: int

    @property
    def decoded(self) -> bool:
        return self.status is DecodeStatus.DECODED

    def as_dict(self) -> dict:
        return {
            "status": self.status.value,
            "v_hat": None if self.v_hat is None else "".join(map(str, self.v_hat.tolist())),
            "d_hat": None if self.d_hat is None else "".join(map(str, self.d_hat.tolist())),
            "metric": self.metric,
            "cycles": self.cycles,
            "stack_used": self.stack_used,
            "fg_ops": self.fg_ops,
            "total_insertions": self.total_insertions,
        }


class _Run:
    """Per-frame state shared by the main loop and the node handlers."""

    def __init__(self, spec, tables, channel_llrs, options):
        llrs = np.asarray(channel_llrs, dtype=np.float64)
        if llrs.shape != (spec.N,):
            raise ValueError(f"expected {spec.N} channel LLRs, got shape {llrs.shape}")
        if tables.N != spec.N:
            raise ValueError("construction tables do not match the code length")
        self.spec = spec
        self.options = options
        self.channel = np.clip(llrs, -LLR_MAX, LLR_MAX)
        self.E0 = tables.E0
        if options.thresholds is None:
            self.gamma = np.full(spec.N, -np.inf)
        else:
            self.gamma = np.asarray(options.thresholds, dtype=np.float64)
            if self.gamma.shape != (spec.N,):
                raise ValueError("threshold vector must have length N")
        self.profile = spec.rate_profile
        self.poly = spec.conn_poly
        self.s_values = calculate_s_values(spec.rate_profile)
        self.store = BoundedDepq(options.stack_capacity)
        self.fg_ops = 0
        self.insertions = 0
        root = PathEntry(0.0, np.zeros(0, dtype=np.uint8), zero_state(self.poly),
                         np.zeros(spec.N - 1), np.zeros(spec.N, dtype=np.uint8))
        self.store.insert(0.0, root)

    def push(self, metric, top, v_chunk, st, u_chunk, start):
        u = top.u.copy()
        u[start:start + len(u_chunk)] = u_chunk
        entry = PathEntry(metric, np.concatenate((top.v, v_chunk)), st, top.L.copy(), u)
        self.store.insert(metric, entry)
        self.insertions += 1

    def finish(self, cycles, status=None) -> DecodeResult:
        store = self.store
        if not store:
            return DecodeResult(None, None, DecodeStatus.STACK_EXHAUSTED, -math.inf, cycles, 0,
                                self.fg_ops, self.insertions)
        metric, top = store.peek_max()
        if len(top.v) == self.spec.N:
            status = DecodeStatus.DECODED
            d_hat = top.v[self.spec.info_indices]
        else:
            status = status or DecodeStatus.CYCLE_LIMIT
            d_hat = None
        return DecodeResult(top.v.copy(), d_hat, status, metric, cycles, len(store), self.fg_ops,
                            self.insertions)

    def top_is_complete(self) -> bool:
        return len(self.store.peek_max()[1].v) == self.spec.N


def _main_loop(run: _Run, step) -> DecodeResult:
    cycles = 0
    while True:
        if cycles == run.options.max_cycles:
            return run.finish(cycles, DecodeStatus.CYCLE_LIMIT)
        cycles += 1
        metric, top = run.store.extract_max()
        step(run, metric, top)
        if not run.store:
            return run.finish(cycles)
        if run.top_is_complete():
            return run.finish(cycles)


def _bit_step(run: _Run, metric, top):
    i = len(top.v)
    res = update_llr(run.channel, top.L, i, top.u, run.spec.n, run.s_values, max_chunk_size=1)
    run.fg_ops += res.fg_ops
    r = top.L[res.llr_slice]
    if run.profile[i]:
        children = []
        for u_bit in (0, 1):
            # the precoder is invertible, so branch on u and recover v
            v_bit = u_bit ^ (conv_step(0, top.st, run.poly)[0])
            m = float(bit_metric(r, u_bit, run.E0[i:i + 1])[0])
            if m > run.gamma[i]:
                children.append((m, v_bit, u_bit))
        children.sort(key=lambda c: -c[0])
    else:
        u_bit = conv_step(0, top.st, run.poly)[0]
        children = [(float(bit_metric(r, u_bit, run.E0[i:i + 1])[0]), 0, u_bit)]
    for m, v_bit, u_bit in children:
        st = conv_step(v_bit, top.st, run.poly)[1]
        run.push(metric + m, top, np.array([v_bit], dtype=np.uint8), st,
                 np.array([u_bit], dtype=np.uint8), i)


def stack_decode(spec, tables, channel_llrs, options: DecodeOptions | None = None) -> DecodeResult:
    """Bit-by-bit stack decoding.

    Each cycle pops the best path and extends it by one bit: a frozen bit
    gives one child, an information bit up to two. Children of the same
    parent enter the stack best first. Decoding stops as soon as the best
    stored path is complete.
    """
    options = options or DecodeOptions()
    return _main_loop(_Run(spec, tables, channel_llrs, options), _bit_step)


# -- fast decoder -----------------------------------------------------------


def _chunk_metrics(run, r, x, start):
    return bit_metric(r, x, run.E0[start:start + len(r)])


def handle_rate0(run: _Run, metric, top, r, start):
    """All-frozen node: one child, never pruned."""
    size = len(r)
    v_chunk = np.zeros(size, dtype=np.uint8)
    u_chunk, st = conv_encode(v_chunk, run.poly, top.st)
    m = _chunk_metrics(run, r, polar_transform(u_chunk), start)
    run.push(metric + float(m.sum()), top, v_chunk, st, u_chunk, start)


def _handle_candidates(run, metric, top, r, start, candidates, positions):
    thr = float(sum(run.gamma[start + p] for p in positions))
    for v_chunk in candidates:
        u_chunk, st = conv_encode(v_chunk, run.poly, top.st)
        m = _chunk_metrics(run, r, polar_transform(u_chunk), start)
        if float(sum(m[p] for p in positions)) > thr:
            run.push(metric + float(m.sum()), top, v_chunk, st, u_chunk, start)


def handle_rep(run: _Run, metric, top, r, start):
    """One information bit at an arbitrary position p: candidates 0 and e_p."""
    size = len(r)
    (p,) = np.flatnonzero(run.profile[start:start + size])
    zero = np.zeros(size, dtype=np.uint8)
    one = zero.copy()
    one[p] = 1
    _handle_candidates(run, metric, top, r, start, (zero, one), (p,))


def handle_type_iv(run: _Run, metric, top, r, start):
    """Two information bits p1 < p2: four candidates, admitted on the summed
    metric at p1 and p2 against the summed thresholds."""
    size = len(r)
    p1, p2 = np.flatnonzero(run.profile[start:start + size])
    cands = []
    for b1, b2 in ((0, 0), (1, 0), (0, 1), (1, 1)):
        v = np.zeros(size, dtype=np.uint8)
        v[p1], v[p2] = b1, b2
        cands.append(v)
    _handle_candidates(run, metric, top, r, start, cands, (p1, p2))


def rate1_candidates(r, E0_chunk, gamma_chunk, capacity, base_metric=0.0):
    """Best-first search over the 2**N0 node-level words of a rate-1 node.

    Partial words live in a bounded frontier store, finished ones in a
    bounded completed store. A branch whose bit metric does not exceed its
    threshold is cut together with its subtree. Returns the completed words
    best first as ``(metric, bits)``.
    """
    size = len(r)
    m0 = bit_metric(r, 0, E0_chunk).tolist()
    m1 = bit_metric(r, 1, E0_chunk).tolist()
    gam = np.asarray(gamma_chunk, dtype=np.float64).tolist()
    frontier = BoundedDepq(capacity)
    done = BoundedDepq(capacity)
    frontier.insert(base_metric, ())
    count, total = 1, 1 << size
    while count < total and frontier:
        am, bits = frontier.extract_max()
        pos = len(bits)
        for b, mb in ((0, m0[pos]), (1, m1[pos])):
            if mb > gam[pos]:
                if pos + 1 < size:
                    frontier.insert(am + mb, bits + (b,))
                else:
                    done.insert(am + mb, bits + (b,))
                    count += 1
            else:
                count += 1 << (size - pos - 1)
    out = []
    while done:
        out.append(done.extract_max())
    return out


def handle_rate1(run: _Run, metric, top, r, start):
    """All-information node explored with pruning; each surviving word is
    mapped back through the polar transform and the inverse precoder."""
    size = len(r)
    found = rate1_candidates(r, run.E0[start:start + size], run.gamma[start:start + size],
                             run.options.stack_capacity, metric)
    for cm, bits in found:
        u_chunk = polar_transform(np.array(bits, dtype=np.uint8))
        v_chunk, st = conv_decode(u_chunk, run.poly, top.st)
        run.push(cm, top, v_chunk, st, u_chunk, start)


_HANDLERS = {
    NodeType.RATE0: handle_rate0,
    NodeType.REP: handle_rep,
    NodeType.TYPE_IV: handle_type_iv,
    NodeType.RATE1: handle_rate1,
}


def _chunk_step(run: _Run, metric, top):
    res = update_llr(run.channel, top.L, len(top.v), top.u, run.spec.n, run.s_values,
                     run.options.allowed_types, run.options.max_special_chunk_size)
    run.fg_ops += res.fg_ops
    r = top.L[res.llr_slice]
    _HANDLERS[res.node_type](run, metric, top, r, res.chunk_start)


def fast_stack_decode(spec, tables, channel_llrs, options: DecodeOptions | None = None) -> DecodeResult:
    """Stack decoding that consumes one special node per cycle."""
    options = options or DecodeOptions()
    return _main_loop(_Run(spec, tables, channel_llrs, options), _chunk_step)
