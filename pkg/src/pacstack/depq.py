"""Bounded double-ended priority queue for decoding paths.

Implemented as an interval heap: node k holds the pair ``h[2k] <= h[2k+1]``;
the left elements form a min-heap, the right elements a max-heap, and each
node's interval lies inside its parent's. Both ends are reached in
O(log n).

Elements are ordered by ``(metric, -seq)`` where ``seq`` is the insertion
number, so among equal metrics the oldest element is the maximum and the
newest is the minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(eq=False)
class PathEntry:
    """One stack element: the path metric and its satellite data."""

    metric: float
    v: np.ndarray
    st: tuple
    L: np.ndarray | None
    u: np.ndarray | None
    seq: int = -1

    def __len__(self):
        return len(self.v)


class BoundedDepq:
    """Interval heap with a capacity; full inserts evict the minimum first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._h: list[tuple[float, int, Any]] = []
        self._seq = 0
        self.sift_steps = 0

    def __len__(self):
        return len(self._h)

    def __bool__(self):
        return bool(self._h)

    def insert(self, metric: float, item) -> Any:
        """Insert ``item``; returns the evicted item or ``None``."""
        evicted = self.extract_min()[1] if len(self._h) == self.capacity else None
        if isinstance(item, PathEntry):
            item.seq = self._seq
        self._push((metric, -self._seq, item))
        self._seq += 1
        return evicted

    def peek_max(self):
        h = self._h
        if not h:
            raise IndexError("peek on empty queue")
        e = h[1] if len(h) > 1 else h[0]
        return e[0], e[2]

    def peek_min(self):
        if not self._h:
            raise IndexError("peek on empty queue")
        e = self._h[0]
        return e[0], e[2]

    def extract_max(self):
        """Remove and return ``(metric, item)`` with the largest metric."""
        h = self._h
        if not h:
            raise IndexError("extract from empty queue")
        if len(h) <= 2:
            e = h.pop()
            return e[0], e[2]
        top = h[1]
        h[1] = h.pop()
        self._sift_down_max(1)
        return top[0], top[2]

    def extract_min(self):
        """Remove and return ``(metric, item)`` with the smallest metric."""
        h = self._h
        if not h:
            raise IndexError("extract from empty queue")
        if len(h) == 1:
            e = h.pop()
            return e[0], e[2]
        bottom = h[0]
        h[0] = h.pop()
        self._sift_down_min(0)
        return bottom[0], bottom[2]

    def items(self):
        """Stored ``(metric, item)`` pairs in no particular order."""
        return [(e[0], e[2]) for e in self._h]

    # -- heap mechanics -----------------------------------------------------

    def _push(self, e):
        h = self._h
        pos = len(h)
        h.append(e)
        if pos == 0:
            return
        if pos & 1:
            # completes node pos // 2
            if e < h[pos - 1]:
                h[pos], h[pos - 1] = h[pos - 1], e
                self._sift_up_min(pos - 1)
            else:
                self._sift_up_max(pos)
            return
        parent = (pos // 2 - 1) // 2
        if e < h[2 * parent]:
            self._sift_up_min(pos)
        elif e > h[2 * parent + 1]:
            self._sift_up_max(pos)

    def _sift_up_min(self, pos):
        h = self._h
        e = h[pos]
        node = pos // 2
        while node > 0:
            parent = (node - 1) // 2
            p = 2 * parent
            if not e < h[p]:
                break
            h[pos] = h[p]
            pos, node = p, parent
            self.sift_steps += 1
        h[pos] = e

    def _sift_up_max(self, pos):
        h = self._h
        e = h[pos]
        node = pos // 2
        while node > 0:
            parent = (node - 1) // 2
            p = 2 * parent + 1
            if not e > h[p]:
                break
            h[pos] = h[p]
            pos, node = p, parent
            self.sift_steps += 1
        h[pos] = e

    def _sift_down_min(self, pos):
        h = self._h
        size = len(h)
        while True:
            # keep the node ordered
            if pos + 1 < size and h[pos] > h[pos + 1]:
                h[pos], h[pos + 1] = h[pos + 1], h[pos]
            node = pos // 2
            c = 4 * node + 2
            if c >= size:
                return
            if c + 2 < size and h[c + 2] < h[c]:
                c += 2
            if h[c] < h[pos]:
                h[pos], h[c] = h[c], h[pos]
                pos = c
                self.sift_steps += 1
            else:
                return

    def _sift_down_max(self, pos):
        h = self._h
        size = len(h)
        while True:
            if h[pos - 1] > h[pos]:
                h[pos], h[pos - 1] = h[pos - 1], h[pos]
            node = pos // 2
            best = -1
            for child in (2 * node + 1, 2 * node + 2):
                lo = 2 * child
                if lo >= size:
                    break
                cand = lo + 1 if lo + 1 < size else lo
                if best < 0 or h[cand] > h[best]:
                    best = cand
            if best < 0 or not h[best] > h[pos]:
                return
            h[pos], h[best] = h[best], h[pos]
            self.sift_steps += 1
            if best & 1 == 0:
                # singleton leaf node
                return
            pos = best
