"""End-to-end replay, evaluation metrics and parameter sweeps."""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass
from typing import Collection, Sequence

import numpy as np

from . import kernels
from .config import ConfigError, EngineConfig, from_flat
from .decision import VERDICT_CODES, DecisionRecord, Verdict
from .events import Event, EventLogError, validate_log
from .scoring import AggregateScorePoint, score_stream
from .thresholds import threshold_stream


class LogValidationError(EventLogError):
    pass


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class Metrics:
    """Evaluation summary of one replay.

    ``recognition_rate`` covers the legitimate segment (everything before the
    attack, or the whole stream) and is None when that segment has no
    non-warmup decision. ``noc`` and ``elapsed_minutes`` are None when no
    abnormal verdict occurs at or after the attack start.
    """

    recognition_rate: float | None
    noc: int | None
    elapsed_minutes: float | None
    decisions_total: int
    warmup_count: int

    @property
    def detected(self) -> bool:
        return self.noc is not None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _metrics(ts: np.ndarray, codes: np.ndarray, attack_start: int | None) -> Metrics:
    legit = ts < attack_start if attack_start is not None else np.ones(len(ts), dtype=bool)
    legit_codes = codes[legit]
    total = int(legit_codes.size)
    warmup = int(np.count_nonzero(legit_codes == kernels.WARMUP))
    judged = total - warmup
    normal = int(np.count_nonzero(legit_codes == kernels.NORMAL))
    rate = normal / judged if judged else None

    noc = elapsed = None
    if attack_start is not None:
        after = codes[(ts >= attack_start) & (codes != kernels.WARMUP)]
        after_ts = ts[(ts >= attack_start) & (codes != kernels.WARMUP)]
        hits = np.flatnonzero(after == kernels.ABNORMAL)
        if hits.size:
            noc = int(hits[0]) + 1
            elapsed = (int(after_ts[hits[0]]) - attack_start) / 60.0
    return Metrics(rate, noc, elapsed, total, warmup)


def compute_metrics(decisions: Sequence[DecisionRecord], attack_start: int | None = None) -> Metrics:
    for prev, cur in zip(decisions, decisions[1:]):
        if cur.index <= prev.index or cur.ts < prev.ts:
            raise MetricsError(f"decisions out of order at index {cur.index}")
    ts = np.array([d.ts for d in decisions], dtype=np.int64)
    codes = np.array([VERDICT_CODES.index(d.verdict) for d in decisions], dtype=np.int8)
    return _metrics(ts, codes, attack_start)


@dataclass
class ScoredStream:
    """An aggregate stream ready for threshold/decision evaluation."""

    points: list[AggregateScorePoint]
    values: np.ndarray
    ts: np.ndarray

    @classmethod
    def from_points(cls, points: list[AggregateScorePoint]) -> ScoredStream:
        return cls(
            points,
            np.array([p.value for p in points], dtype=np.float64),
            np.array([p.ts for p in points], dtype=np.int64),
        )


def score_log(events: Sequence[Event], contacts: Collection[str], config: EngineConfig) -> ScoredStream:
    report = validate_log(events)
    if not report.ok:
        raise LogValidationError(f"invalid event log: {report.describe()}")
    return ScoredStream.from_points(score_stream(events, contacts, config))


def evaluate(stream: ScoredStream, config: EngineConfig, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Threshold array (NaN = warmup) and verdict codes for a scored stream."""
    k = backend or kernels
    thresholds = threshold_stream(stream.values, stream.ts, config.threshold, backend=k)
    codes = k.classify_stream(stream.values, thresholds, config.decision.tolerance)
    return thresholds, codes


def _records(stream: ScoredStream, thresholds: np.ndarray, codes: np.ndarray,
             tolerance: float) -> list[DecisionRecord]:
    out = []
    for p, value, thr, code in zip(stream.points, stream.values.tolist(), thresholds.tolist(), codes.tolist()):
        verdict = VERDICT_CODES[code]
        if verdict is Verdict.WARMUP:
            out.append(DecisionRecord(p.index, p.ts, value, None, None, verdict))
        else:
            out.append(DecisionRecord(p.index, p.ts, value, thr, thr - tolerance, verdict))
    return out


def replay(events: Sequence[Event], contacts: Collection[str] = frozenset(),
           config: EngineConfig | None = None, attack_start: int | None = None,
           backend=None) -> tuple[list[DecisionRecord], Metrics]:
    """Run the full pipeline over a log and evaluate it."""
    config = config or EngineConfig()
    stream = score_log(events, contacts, config)
    thresholds, codes = evaluate(stream, config, backend)
    records = _records(stream, thresholds, codes, config.decision.tolerance)
    return records, _metrics(stream.ts, codes, attack_start)


# grid name -> config key
GRID_PARAMS = {
    "strategy": "threshold.strategy",
    "tolerance": "decision.tolerance",
    "alpha": "threshold.alpha",
    "asba_block_size": "threshold.asba_block_size",
    "block_len_events": "threshold.block_len_events",
    "training_len": "threshold.training_len_days",
    "training_len_days": "threshold.training_len_days",
    "training_len_events": "threshold.training_len_events",
}
_GRID_KEYS = {**GRID_PARAMS, **{v: v for v in GRID_PARAMS.values()}}

SWEEP_COLUMNS = (
    "strategy", "tolerance", "alpha", "asba_block_size", "block_len_events",
    "training_len_events", "training_len_days",
)


@dataclass(frozen=True)
class SweepRow:
    params: dict
    metrics: Metrics


def _grid_points(grid: dict) -> list[dict]:
    for name, values in grid.items():
        if name not in _GRID_KEYS:
            raise ConfigError(f"unknown sweep parameter {name!r}; expected one of {sorted(GRID_PARAMS)}")
        if not isinstance(values, (list, tuple)) or not values:
            raise ConfigError(f"sweep parameter {name!r} needs a non-empty list of values")
    names = list(grid)
    return [dict(zip(names, combo)) for combo in itertools.product(*(grid[n] for n in names))]


def _apply(base: EngineConfig, point: dict) -> EngineConfig:
    overrides = {}
    for name, value in point.items():
        key = _GRID_KEYS[name]
        overrides[key] = value
        if key == "threshold.training_len_days":
            overrides["threshold.training_len_events"] = None
    return from_flat(overrides, base=base)


def _row_params(cfg: EngineConfig) -> dict:
    t = cfg.threshold
    return {
        "strategy": t.strategy,
        "tolerance": cfg.decision.tolerance,
        "alpha": t.alpha,
        "asba_block_size": t.asba_block_size,
        "block_len_events": t.block_len_events,
        "training_len_events": t.training_len_events,
        "training_len_days": t.training_len_days,
    }


def sweep(events: Sequence[Event], contacts: Collection[str], base_config: EngineConfig,
          grid: dict, attack_start: int | None = None, backend=None) -> list[SweepRow]:
    """One evaluation per grid point, in grid order.

    Swept parameters only affect thresholds and decisions, so the log is
    scored once and every grid point reuses the same aggregate stream.
    """
    configs = [_apply(base_config, p) for p in _grid_points(grid)]
    stream = score_log(events, contacts, base_config)
    rows = []
    for cfg in configs:
        _, codes = evaluate(stream, cfg, backend)
        rows.append(SweepRow(_row_params(cfg), _metrics(stream.ts, codes, attack_start)))
    return rows


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(SWEEP_COLUMNS + ("recognition_rate", "noc", "elapsed_minutes"))]
    for row in rows:
        m = row.metrics
        cells = [_cell(row.params[c]) for c in SWEEP_COLUMNS]
        cells.append("NA" if m.recognition_rate is None else f"{m.recognition_rate:.6f}")
        cells.append("NA" if m.noc is None else str(m.noc))
        cells.append("NA" if m.elapsed_minutes is None else f"{m.elapsed_minutes:.6f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
