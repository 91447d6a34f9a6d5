"""Decision-threshold strategies over the aggregate score stream.

Four strategies are provided, each as a streaming observer (one threshold
per aggregate point) and as a batch function backed by :mod:`.kernels`:

``static``
    mean - sd of a training prefix, frozen afterwards.
``sd_block``
    the stream is cut into blocks of ``block_len_events``; each block uses
    mean - sd of the previous block. The first block is warmup.
``ewma_direct``
    ``T1 = AS1``, ``Tt = alpha*AS(t-1) + (1-alpha)*T(t-1)``. No warmup.
``ewma_sd_block``
    mean - sd of a training prefix, then one EWMA step per completed block
    of ``asba_block_size`` points using the block average; each new value
    applies to the following block.

A threshold of ``None`` (NaN in batch arrays) marks a warmup point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from ._pykernels import block_stats as _block_stats
from .config import ThresholdConfig

SECONDS_PER_DAY = 86400


class InsufficientTrainingError(ValueError):
    pass


@dataclass(frozen=True)
class BlockStats:
    mean: float
    sd: float
    count: int


@dataclass(frozen=True)
class ThresholdPoint:
    index: int
    value: float | None

    @property
    def warmup(self) -> bool:
        return self.value is None


def block_stats(values: Sequence[float], ddof: int = 0) -> BlockStats:
    mean, sd = _block_stats(values, 0, len(values), ddof)
    return BlockStats(mean, sd, len(values))


def static_fit(training_scores: Sequence[float], ddof: int = 0) -> float:
    if len(training_scores) < 2:
        raise InsufficientTrainingError(
            f"static threshold needs at least 2 training scores, got {len(training_scores)}"
        )
    st = block_stats(training_scores, ddof)
    return st.mean - st.sd


def asba(block: Sequence[float]) -> float:
    """Aggregate score block average."""
    if not block:
        raise ValueError("asba of an empty block")
    s = 0.0
    for x in block:
        s += x
    return s / len(block)


class _TrainingWindow:
    """Decides when a training prefix is complete.

    With an event count the prefix is exactly that many points. With a span in
    days it holds every point earlier than ``first_ts + days``, extended if
    needed until ``min_count`` points are collected.
    """

    def __init__(self, cfg: ThresholdConfig, min_count: int):
        self.n_events = cfg.training_len_events
        self.span_s = cfg.training_len_days * SECONDS_PER_DAY
        self.min_count = min_count
        self.first_ts: int | None = None
        if self.n_events is not None and self.n_events < min_count:
            raise InsufficientTrainingError(
                f"training_len_events={self.n_events} is below the minimum of {min_count}"
            )

    def closes_before(self, ts: int, collected: int) -> bool:
        """True if the point at ``ts`` falls after the training prefix."""
        if self.first_ts is None:
            self.first_ts = ts
        if self.n_events is not None:
            return collected >= self.n_events
        return collected >= self.min_count and ts >= self.first_ts + self.span_s


def training_count(ts: Sequence[int], cfg: ThresholdConfig, min_count: int = 1) -> int:
    """Length of the training prefix for a stream with these timestamps."""
    window = _TrainingWindow(cfg, min_count)
    for i, t in enumerate(ts):
        if window.closes_before(t, i):
            return i
    return len(ts)


class StaticThreshold:
    def __init__(self, cfg: ThresholdConfig):
        self.ddof = cfg.sd_ddof
        self.window = _TrainingWindow(cfg, 2)
        self.training: list[float] = []
        self.value: float | None = None

    def observe(self, index: int, ts: int, score: float) -> ThresholdPoint:
        if self.value is None and self.window.closes_before(ts, len(self.training)):
            self.value = static_fit(self.training, self.ddof)
        if self.value is None:
            self.training.append(score)
        return ThresholdPoint(index, self.value)


class SdBlockThreshold:
    def __init__(self, cfg: ThresholdConfig):
        self.block_len = cfg.block_len_events
        self.ddof = cfg.sd_ddof
        self.block: list[float] = []
        self.value: float | None = None

    def observe(self, index: int, ts: int, score: float) -> ThresholdPoint:
        point = ThresholdPoint(index, self.value)
        self.block.append(score)
        if len(self.block) == self.block_len:
            st = block_stats(self.block, self.ddof)
            self.value = st.mean - st.sd
            self.block = []
        return point


class EwmaDirectThreshold:
    def __init__(self, cfg: ThresholdConfig):
        self.alpha = cfg.alpha
        self.beta = 1.0 - cfg.alpha
        self.value: float | None = None
        self.prev_score: float | None = None

    def observe(self, index: int, ts: int, score: float) -> ThresholdPoint:
        if self.value is None:
            self.value = score
        else:
            self.value = self.alpha * self.prev_score + self.beta * self.value
        self.prev_score = score
        return ThresholdPoint(index, self.value)


class EwmaSdBlockThreshold:
    def __init__(self, cfg: ThresholdConfig):
        self.alpha = cfg.alpha
        self.beta = 1.0 - cfg.alpha
        self.block_size = cfg.asba_block_size
        self.ddof = cfg.sd_ddof
        self.window = _TrainingWindow(cfg, 1)
        self.training: list[float] = []
        self.block: list[float] = []
        self.value: float | None = None

    def observe(self, index: int, ts: int, score: float) -> ThresholdPoint:
        if self.value is None:
            if not self.window.closes_before(ts, len(self.training)):
                self.training.append(score)
                return ThresholdPoint(index, None)
            st = block_stats(self.training, self.ddof)
            self.value = st.mean - st.sd
        point = ThresholdPoint(index, self.value)
        self.block.append(score)
        if len(self.block) == self.block_size:
            self.value = self.alpha * asba(self.block) + self.beta * self.value
            self.block = []
        return point


_OBSERVERS = {
    "static": StaticThreshold,
    "sd_block": SdBlockThreshold,
    "ewma_direct": EwmaDirectThreshold,
    "ewma_sd_block": EwmaSdBlockThreshold,
}


def make_observer(cfg: ThresholdConfig):
    return _OBSERVERS[cfg.strategy](cfg)


def threshold_stream(scores: Sequence[float], ts: Sequence[int], cfg: ThresholdConfig,
                     backend=None) -> np.ndarray:
    """Batch thresholds for a whole aggregate stream; NaN marks warmup."""
    k = backend or kernels
    values = np.asarray(scores, dtype=np.float64)
    if cfg.strategy == "ewma_direct":
        return k.ewma_direct_stream(values, cfg.alpha)
    if cfg.strategy == "sd_block":
        return k.sd_block_stream(values, cfg.block_len_events, cfg.sd_ddof)
    if cfg.strategy == "static":
        n_train = training_count(ts, cfg, 2)
        if n_train < 2:
            # a stream this short never leaves training
            return np.full(len(values), np.nan)
        return k.static_stream(values, n_train, cfg.sd_ddof)
    n_train = training_count(ts, cfg, 1)
    if n_train < 1:
        return np.full(len(values), np.nan)
    return k.ewma_sd_block_stream(values, n_train, cfg.asba_block_size, cfg.alpha, cfg.sd_ddof)


def run_observer(cfg: ThresholdConfig, points) -> list[ThresholdPoint]:
    """Feed points exposing ``index``, ``ts`` and ``value`` through a fresh observer."""
    obs = make_observer(cfg)
    return [obs.observe(p.index, p.ts, p.value) for p in points]
