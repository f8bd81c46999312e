"""Monte-Carlo FER and complexity sweeps over the BI-AWGN channel.

Frame ``k`` of a sweep draws its data and noise from
``numpy.random.default_rng([seed, k])`` (PCG64 seeded through SeedSequence),
so every frame is reproducible on its own and the results do not depend on
how frames are spread over workers. The same noise stream is reused at every
Eb/N0 point.
"""

from __future__ import annotations

import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import engine as _engine
from .code import PacCodeSpec
from .construction import build_tables
from .decoders import DecodeOptions, fast_stack_decode, stack_decode
from .precoder import pac_encode

VARIANTS = ("stack", "pstackd_var", "fast")
ENGINES = ("compiled", "python")
CSV_HEADER = "ebn0_db,frames,errors,fer,avg_cycles,avg_stack_used,avg_fg_ops,avg_total_insertions"


def ebn0_to_sigma(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at a given Eb/N0."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def awgn_transmit(codeword, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK over AWGN; returns the channel LLRs ``2 y / sigma**2``."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(codeword)
    if np.any((x != 0) & (x != 1)):
        raise ValueError("codeword must be binary")
    y = (1.0 - 2.0 * x) + sigma * rng.standard_normal(x.shape)
    return 2.0 * y / sigma ** 2


@dataclass
class SweepConfig:
    """One FER sweep.

    ``p_th`` is either one value for all points or one per point. The
    ``stack`` variant ignores it (no pruning) but still needs a valid value
    to build the metric biases.
    """

    spec: PacCodeSpec
    ebn0_db: Sequence[float]
    variant: str = "fast"
    options: DecodeOptions = field(default_factory=DecodeOptions)
    p_th: float | Sequence[float] = 1e-3
    threshold_combine: str = "min"
    min_frames: int = 1
    min_errors: int = 400
    max_frames: int = 1_000_000
    seed: int = 0
    workers: int = 1
    all_zero: bool = False
    engine: str = "compiled"

    def __post_init__(self):
        self.ebn0_db = [float(e) for e in np.atleast_1d(self.ebn0_db)]
        if not self.ebn0_db:
            raise ValueError("Eb/N0 grid is empty")
        p = np.atleast_1d(np.asarray(self.p_th, dtype=np.float64))
        if p.size == 1:
            p = np.repeat(p, len(self.ebn0_db))
        if p.size != len(self.ebn0_db):
            raise ValueError("need one p_th or one per Eb/N0 point")
        self.p_th = [float(x) for x in p]
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.min_frames < 1:
            raise ValueError("min_frames must be at least 1")
        if self.max_frames < self.min_frames:
            raise ValueError("max_frames must be >= min_frames")
        if self.min_errors < 1:
            raise ValueError("min_errors must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class PointReport:
    ebn0_db: float
    frames: int
    frame_errors: int
    fer: float
    avg_cycles: float
    avg_stack_used: float
    avg_fg_ops: float
    avg_total_insertions: float

    def csv_row(self) -> str:
        return (f"{self.ebn0_db:.4f},{self.frames},{self.frame_errors},{self.fer:.6e},"
                f"{self.avg_cycles:.6f},{self.avg_stack_used:.6f},{self.avg_fg_ops:.6f},"
                f"{self.avg_total_insertions:.6f}")


def write_csv(reports, fh=None) -> str:
    """Write the sweep CSV to ``fh`` (if given) and return it as text."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in reports:
        buf.write(r.csv_row() + "\n")
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


# -- frame simulation -----------------------------------------------------------


class _Point:
    """Everything needed to simulate frames at one Eb/N0 point."""

    def __init__(self, config: SweepConfig, k: int):
        spec = config.spec
        self.spec = spec
        self.sigma = ebn0_to_sigma(config.ebn0_db[k], spec.rate) if spec.K else 1.0
        self.tables = build_tables(self.sigma, spec.n, config.p_th[k], config.threshold_combine)
        thresholds = None if config.variant == "stack" else self.tables.gamma_T
        self.options = dataclasses.replace(config.options, thresholds=thresholds)
        self.bitwise = config.variant != "fast"
        self.seed = config.seed
        self.all_zero = config.all_zero
        self.engine = config.engine

    def decode(self, llrs):
        if self.engine == "compiled":
            return _engine.decode(self.spec, self.tables, llrs, self.options, self.bitwise)
        fn = stack_decode if self.bitwise else fast_stack_decode
        return fn(self.spec, self.tables, llrs, self.options)

    def frame(self, idx: int):
        """Simulate frame ``idx``: ``(error, cycles, stack_used, fg_ops, insertions)``."""
        spec = self.spec
        rng = np.random.default_rng([self.seed, idx])
        if self.all_zero:
            d = np.zeros(spec.K, dtype=np.uint8)
        else:
            d = rng.integers(0, 2, spec.K, dtype=np.uint8)
        llrs = awgn_transmit(pac_encode(d, spec), self.sigma, rng)
        res = self.decode(llrs)
        error = not res.decoded or not np.array_equal(res.d_hat, d)
        return (int(error), res.cycles, res.stack_used, res.fg_ops, res.total_insertions)

    def frames(self, start: int, stop: int) -> np.ndarray:
        return np.array([self.frame(k) for k in range(start, stop)], dtype=np.int64).reshape(-1, 5)


_worker_point: _Point | None = None


def _init_worker(config, k):
    global _worker_point
    _worker_point = _Point(config, k)


def _worker_frames(bounds):
    return _worker_point.frames(*bounds)


def _stop_index(errors_cum, start, config) -> int | None:
    """Number of frames after which the stopping rule fires, if it does in
    this batch. ``errors_cum[j]`` is the error count after frame ``start+j``."""
    for j, errs in enumerate(errors_cum):
        done = start + j + 1
        if done >= config.min_frames and (errs >= config.min_errors or done >= config.max_frames):
            return done
    return None


def run_point(config: SweepConfig, k: int, batch: int = 256) -> PointReport:
    """Simulate one Eb/N0 point until the stopping rule fires.

    Frames are consumed in index order; a point stops after the first frame
    at which ``min_frames`` is reached and either ``min_errors`` errors or
    ``max_frames`` frames have been seen.
    """
    rows = []
    done = 0
    errors = 0

    def consume(chunk):
        nonlocal done, errors
        cum = errors + np.cumsum(chunk[:, 0])
        stop = _stop_index(cum, done, config)
        take = len(chunk) if stop is None else stop - done
        rows.append(chunk[:take])
        done += take
        errors = int(cum[take - 1])
        return stop is not None

    if config.workers == 1:
        point = _Point(config, k)
        while not consume(point.frames(done, min(done + batch, config.max_frames))):
            pass
    else:
        with ProcessPoolExecutor(config.workers, initializer=_init_worker,
                                 initargs=(config, k)) as pool:
            finished = False
            while not finished:
                # one round of batches; results are merged in frame order
                starts = range(done, min(done + config.workers * batch, config.max_frames), batch)
                bounds = [(s, min(s + batch, config.max_frames)) for s in starts]
                for chunk in pool.map(_worker_frames, bounds):
                    if consume(chunk):
                        finished = True
                        break

    data = np.concatenate(rows)
    frames = len(data)
    avg = data[:, 1:].sum(axis=0) / frames
    return PointReport(config.ebn0_db[k], frames, errors, errors / frames, *map(float, avg))


def run_fer(config: SweepConfig) -> list[PointReport]:
    """FER and complexity at every point of the Eb/N0 grid."""
    return [run_point(config, k) for k in range(len(config.ebn0_db))]
