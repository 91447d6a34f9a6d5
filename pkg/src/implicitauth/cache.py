"""Per-feature priority lists with linear time decay.

Each identifier seen by a feature (phone number, domain, SSID) holds an
occurrence count ``ot`` and the time it was last seen.  Its priority is::

    value = base + weight * ot - hours_since_last_seen

Entries whose value drops below zero are forgotten, including their count.
Values are evaluated lazily at query time; nothing runs between events.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .events import hours


class ClockRegressionError(ValueError):
    """An update arrived with a timestamp earlier than state already seen."""


@dataclass(frozen=True)
class CacheParams:
    base: float
    weight: float

    def __post_init__(self):
        if not self.base > 0:
            raise ValueError(f"cache base must be > 0, got {self.base}")
        if self.weight < 0:
            raise ValueError(f"cache weight must be >= 0, got {self.weight}")


SMS_PARAMS = CacheParams(120, 48)
CALL_PARAMS = CacheParams(120, 48)
BROWSER_PARAMS = CacheParams(72, 8)
WIFI_PARAMS = CacheParams(100, 18)


@dataclass
class CacheEntry:
    id: str
    occurrence_count: int
    last_seen: int


def current_value(entry: CacheEntry, now: int, params: CacheParams) -> float:
    if now < entry.last_seen:
        raise ClockRegressionError(
            f"{entry.id!r}: now={now} is earlier than last_seen={entry.last_seen}"
        )
    return params.base + params.weight * entry.occurrence_count - hours(now - entry.last_seen)


class PriorityCache:
    """Relevance list for one feature.

    Single writer; callers are expected to replay events in time order.
    """

    def __init__(self, params: CacheParams):
        self.params = params
        self.entries: dict[str, CacheEntry] = {}
        self._clock: int | None = None

    def __len__(self):
        return len(self.entries)

    def __contains__(self, ident):
        return ident in self.entries

    def _advance(self, now: int) -> None:
        if self._clock is not None and now < self._clock:
            raise ClockRegressionError(f"now={now} is earlier than cache clock {self._clock}")
        self._clock = now

    def value(self, ident: str, now: int) -> float:
        return current_value(self.entries[ident], now, self.params)

    def record(self, ident: str, now: int) -> CacheEntry:
        """Count one occurrence of ``ident`` at ``now``. Does not prune."""
        self._advance(now)
        entry = self.entries.get(ident)
        if entry is None:
            entry = self.entries[ident] = CacheEntry(ident, 1, now)
        else:
            entry.occurrence_count += 1
            entry.last_seen = now
        return entry

    def prune(self, now: int) -> list[str]:
        """Drop every entry whose value at ``now`` is negative; return their ids."""
        self._advance(now)
        dead = [k for k, e in self.entries.items() if current_value(e, now, self.params) < 0]
        for k in dead:
            del self.entries[k]
        return dead

    def ranked(self, now: int) -> list[tuple[float, CacheEntry]]:
        """Live entries at ``now``, best first.

        Ties on value go to the higher count, then the more recent entry,
        then the lexicographically smaller id.
        """
        live = []
        for e in self.entries.values():
            v = current_value(e, now, self.params)
            if v >= 0:
                live.append((v, e))
        live.sort(key=lambda ve: (-ve[0], -ve[1].occurrence_count, -ve[1].last_seen, ve[1].id))
        return live

    def top_k(self, k: int, now: int) -> list[str]:
        if k <= 0:
            return []
        return [e.id for _, e in self.ranked(now)[:k]]

    def dump(self) -> dict[str, dict[str, int]]:
        return {
            k: {"ot": e.occurrence_count, "last_seen": e.last_seen}
            for k, e in sorted(self.entries.items())
        }

    def dumps(self) -> str:
        return json.dumps(self.dump(), sort_keys=True)
