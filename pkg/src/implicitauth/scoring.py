"""Per-feature condition scores and the aggregate score stream.

Each qualifying event replaces the score of its own feature; the other
feature scores only decay (linearly, ``mu`` points per hour, floored at 0).
The aggregate score is the plain sum of the four feature scores and is
emitted once per qualifying event.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Iterator

from . import events as ev
from .cache import ClockRegressionError, PriorityCache
from .config import DampingConfig, EngineConfig, ScoreWeights

FEATURES = ("sms", "call", "browser", "wifi")


@dataclass(frozen=True)
class AggregateScorePoint:
    index: int
    ts: int
    sms: float
    call: float
    browser: float
    wifi: float

    @property
    def value(self) -> float:
        return self.sms + self.call + self.browser + self.wifi


def score_sms(event: ev.Event, cache: PriorityCache, contacts: Collection[str], w: ScoreWeights, now: int) -> float:
    top = cache.top_k(w.sms_call_top_k, now)
    score = w.sms_top5_points if event.peer in top else 0.0
    if event.peer in contacts:
        score += w.sms_contact_points
    cache.prune(now)
    cache.record(event.peer, now)
    return score


def score_call(event: ev.Event, cache: PriorityCache, contacts: Collection[str], w: ScoreWeights, now: int) -> float:
    top = cache.top_k(w.sms_call_top_k, now)
    score = w.call_top5_points if event.peer in top else 0.0
    if event.peer in contacts:
        score += w.call_contact_points
    if event.duration_s >= w.call_long_duration_threshold_s:
        score += w.call_long_duration_points
    cache.prune(now)
    cache.record(event.peer, now)
    return score


def score_browser_poll(event: ev.Event, cache: PriorityCache, w: ScoreWeights, now: int) -> float:
    top = set(cache.top_k(w.browser_top_k, now))
    visited = list(dict.fromkeys(event.domains))
    score = w.browser_per_domain_points * sum(1 for d in visited if d in top)
    cache.prune(now)
    for d in visited:
        cache.record(d, now)
    return score


def score_wifi_session(event: ev.Event, cache: PriorityCache, w: ScoreWeights, now: int) -> float | None:
    """None when the session is too short to count; the cache is then untouched."""
    if event.duration_s < w.wifi_min_session_s:
        return None
    score = w.wifi_top5_points if event.peer in cache.top_k(w.sms_call_top_k, now) else 0.0
    cache.prune(now)
    cache.record(event.peer, now)
    return score


class ScoringEngine:
    """Sequential event processor producing the aggregate score stream."""

    def __init__(self, contacts: Collection[str] = frozenset(), config: EngineConfig | None = None):
        config = config or EngineConfig()
        self.contacts = frozenset(contacts)
        self.weights = config.scoring
        self.damping: DampingConfig = config.damping
        self.caches = {f: PriorityCache(getattr(config.cache, f)) for f in FEATURES}
        self.scores = dict.fromkeys(FEATURES, 0.0)
        self.last_update: int | None = None
        self.index = 0

    def apply_damping(self, now: int) -> None:
        if self.last_update is not None:
            if now < self.last_update:
                raise ClockRegressionError(f"event at {now} precedes last update {self.last_update}")
            drop = self.damping.mu * ev.hours(now - self.last_update)
            if drop:
                for f in FEATURES:
                    self.scores[f] = max(0.0, self.scores[f] - drop)
        self.last_update = now

    def _score(self, event: ev.Event) -> tuple[str, float | None]:
        now, w = event.ts, self.weights
        if event.kind in ev.SMS_KINDS:
            return "sms", score_sms(event, self.caches["sms"], self.contacts, w, now)
        if event.kind in ev.CALL_KINDS:
            return "call", score_call(event, self.caches["call"], self.contacts, w, now)
        if event.kind == ev.BROWSER_POLL:
            if not event.domains:
                return "browser", None
            return "browser", score_browser_poll(event, self.caches["browser"], w, now)
        if event.kind == ev.WIFI_SESSION:
            return "wifi", score_wifi_session(event, self.caches["wifi"], w, now)
        raise ev.EventSchemaError(f"unknown event kind {event.kind!r}")

    def process(self, event: ev.Event) -> AggregateScorePoint | None:
        """Damp, score, and emit the next aggregate point (None for skipped events)."""
        self.apply_damping(event.ts)
        feature, score = self._score(event)
        if score is None:
            return None
        self.scores[feature] = score
        self.index += 1
        s = self.scores
        return AggregateScorePoint(self.index, event.ts, s["sms"], s["call"], s["browser"], s["wifi"])

    def run(self, events: Iterable[ev.Event]) -> Iterator[AggregateScorePoint]:
        for event in events:
            point = self.process(event)
            if point is not None:
                yield point


def score_stream(events: Iterable[ev.Event], contacts: Collection[str] = frozenset(),
                 config: EngineConfig | None = None) -> list[AggregateScorePoint]:
    return list(ScoringEngine(contacts, config).run(events))


SCORE_CSV_HEADER = "index,ts,sms_score,call_score,browser_score,wifi_score,aggregate_score"


def format_score_csv(points: Iterable[AggregateScorePoint]) -> str:
    lines = [SCORE_CSV_HEADER]
    for p in points:
        lines.append(
            f"{p.index},{p.ts},{p.sms:.6f},{p.call:.6f},{p.browser:.6f},{p.wifi:.6f},{p.value:.6f}"
        )
    return "\n".join(lines) + "\n"
