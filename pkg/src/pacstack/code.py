"""PAC code parameters, rate profiles and the information-bit partition."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

# c(t) = t^10 + t^9 + t^7 + t^3 + 1, listed c_0 first
DEFAULT_CONN_POLY = (1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1)


class NodeType(enum.Enum):
    RATE0 = "rate0"
    REP = "rep"
    TYPE_IV = "type_iv"
    RATE1 = "rate1"
    NOT_SPECIAL = "not_special"


SPECIAL_TYPES = frozenset({NodeType.RATE0, NodeType.REP, NodeType.TYPE_IV, NodeType.RATE1})

# order in which overlapping counts are resolved
_PRECEDENCE = (NodeType.RATE1, NodeType.RATE0, NodeType.REP, NodeType.TYPE_IV)


@dataclass(frozen=True)
class PacCodeSpec:
    """Parameters of a PAC code.

    Parameters
    ----------
    n : int
        Tree depth, the code length is ``N = 2**n``.
    rate_profile : array-like of {0, 1}
        Length-N indicator of the information positions.
    conn_poly : sequence of {0, 1}
        Convolutional coefficients ``c_0 .. c_m`` in ascending powers.
    """

    n: int
    rate_profile: np.ndarray
    conn_poly: tuple = DEFAULT_CONN_POLY
    info_indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        profile = np.asarray(self.rate_profile, dtype=np.uint8).copy()
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if profile.ndim != 1 or profile.size != 1 << self.n:
            raise ValueError(f"rate profile must have length {1 << self.n}, got {profile.size}")
        if np.any(profile > 1):
            raise ValueError("rate profile entries must be 0 or 1")
        poly = tuple(int(c) for c in self.conn_poly)
        if not poly or poly[0] != 1 or poly[-1] != 1 or any(c not in (0, 1) for c in poly):
            raise ValueError(f"connection polynomial must be binary with c_0 = c_m = 1, got {poly}")
        profile.setflags(write=False)
        info = np.flatnonzero(profile)
        info.setflags(write=False)
        object.__setattr__(self, "rate_profile", profile)
        object.__setattr__(self, "conn_poly", poly)
        object.__setattr__(self, "info_indices", info)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return int(self.info_indices.size)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def memory(self) -> int:
        """Degree m of the connection polynomial (register length)."""
        return len(self.conn_poly) - 1

    @classmethod
    def reed_muller(cls, n: int, K: int, conn_poly=DEFAULT_CONN_POLY) -> "PacCodeSpec":
        return cls(n, rm_rate_profile(n, K), conn_poly)


def rm_rate_profile(n: int, K: int) -> np.ndarray:
    """Weight-based (Reed-Muller) rate profile.

    Picks the K positions whose zero-based index has the largest binary
    weight. Among equal weights the larger index wins.
    """
    N = 1 << n
    if not 0 <= K <= N:
        raise ValueError(f"K must lie in [0, {N}], got {K}")
    idx = np.arange(N)
    weights = np.array([bin(i).count("1") for i in idx])
    # lexsort uses the last key as primary
    order = np.lexsort((-idx, -weights))
    profile = np.zeros(N, dtype=np.uint8)
    profile[order[:K]] = 1
    return profile


def calculate_s_values(rate_profile) -> list[np.ndarray]:
    """Number of information bits in every dyadic segment.

    ``levels[d][j]`` counts the information bits in segment ``j`` of length
    ``N / 2**d``; ``levels[0]`` is ``[K]`` and ``levels[n]`` is the profile.
    """
    profile = np.asarray(rate_profile, dtype=np.int64)
    N = profile.size
    if N == 0 or N & (N - 1):
        raise ValueError(f"rate profile length must be a power of two, got {N}")
    n = N.bit_length() - 1
    levels = [profile.copy()]
    for _ in range(n):
        levels.append(levels[-1].reshape(-1, 2).sum(axis=1))
    return levels[::-1]


def classify_count(count: int, chunk_size: int, allowed_types=SPECIAL_TYPES) -> NodeType:
    """Node type of a chunk holding ``count`` information bits."""
    matches = []
    if count == chunk_size:
        matches.append(NodeType.RATE1)
    if count == 0:
        matches.append(NodeType.RATE0)
    if count == 1:
        matches.append(NodeType.REP)
    if count == 2 and chunk_size >= 2:
        matches.append(NodeType.TYPE_IV)
    for t in _PRECEDENCE:
        if t in matches and t in allowed_types:
            return t
    if chunk_size == 1:
        # leaves always terminate the descent
        return matches[0]
    return NodeType.NOT_SPECIAL


def classify_chunk(s_values, level: int, chunk_index: int, allowed_types=SPECIAL_TYPES,
                   max_chunk_size: int | None = None) -> NodeType:
    """Classify segment ``chunk_index`` at tree ``level`` (0 = root).

    Chunks larger than ``max_chunk_size`` are never special.
    """
    n = len(s_values) - 1
    chunk_size = 1 << (n - level)
    if max_chunk_size is not None and chunk_size > max_chunk_size:
        allowed_types = ()
    return classify_count(int(s_values[level][chunk_index]), chunk_size, allowed_types)


def chunk_segmentation(s_values, allowed_types=SPECIAL_TYPES, max_chunk_size=None):
    """Offline partition of the leaves into the chunks the fast decoder visits.

    Returns a list of ``(start, size, NodeType)``. The partition depends only
    on the profile, not on the received word.
    """
    n = len(s_values) - 1
    N = 1 << n
    chunks = []
    i = 0
    while i < N:
        s = n - 1 if i == 0 else (i & -i).bit_length() - 1
        while True:
            level = n - s
            t = classify_chunk(s_values, level, i >> s, allowed_types, max_chunk_size)
            if t is not NodeType.NOT_SPECIAL:
                chunks.append((i, 1 << s, t))
                i += 1 << s
                break
            s -= 1
    return chunks


def parse_profile(text: str) -> np.ndarray:
    """Read a profile written as one line of '0'/'1' characters."""
    bits = text.strip()
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError("rate profile must be a non-empty string of 0/1 characters")
    return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")


def format_profile(rate_profile) -> str:
    return "".join(str(int(b)) for b in rate_profile)


def parse_poly(text: str) -> tuple:
    """Parse a connection polynomial.

    A plain binary string lists ``c_0 .. c_m`` left to right. A ``0x``
    prefixed hex string is read as an integer whose bit j is ``c_j``.
    """
    s = text.strip().lower()
    if s.startswith("0x"):
        value = int(s, 16)
        if value <= 0:
            raise ValueError("connection polynomial must be non-zero")
        return tuple((value >> j) & 1 for j in range(value.bit_length()))
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"cannot parse connection polynomial {text!r}")
    return tuple(int(ch) for ch in s)
