"""Event vocabulary, contact lists and JSON Lines event-log I/O.

Every record is one JSON object per line::

    {"ts": 1000, "kind": "sms_in", "peer": "+447700900001"}
    {"ts": 2000, "kind": "call_out", "peer": "+447700900001", "duration_s": 95}
    {"ts": 2400, "kind": "browser_poll", "domains": ["bbc.co.uk", "github.com"]}
    {"ts": 3000, "kind": "wifi_session", "peer": "HomeAP", "session_start": 1800, "duration_s": 1200}

A ``wifi_session`` is written when the connection ends, so ``ts`` is the
disconnect time and ``session_start`` the connect time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

SMS_IN = "sms_in"
SMS_OUT = "sms_out"
CALL_IN = "call_in"
CALL_OUT = "call_out"
BROWSER_POLL = "browser_poll"
WIFI_SESSION = "wifi_session"

KINDS = (SMS_IN, SMS_OUT, CALL_IN, CALL_OUT, BROWSER_POLL, WIFI_SESSION)
SMS_KINDS = frozenset({SMS_IN, SMS_OUT})
CALL_KINDS = frozenset({CALL_IN, CALL_OUT})

# kind -> keys required besides "ts" and "kind"
_KIND_KEYS = {
    SMS_IN: frozenset({"peer"}),
    SMS_OUT: frozenset({"peer"}),
    CALL_IN: frozenset({"peer", "duration_s"}),
    CALL_OUT: frozenset({"peer", "duration_s"}),
    BROWSER_POLL: frozenset({"domains"}),
    WIFI_SESSION: frozenset({"peer", "session_start", "duration_s"}),
}


class EventLogError(ValueError):
    """Base class for problems with event-log input."""


class EventParseError(EventLogError):
    """A line is not valid JSON."""


class EventSchemaError(EventLogError):
    """A decoded record does not match the event schema."""


def hours(seconds: float) -> float:
    return seconds / 3600.0


def normalize_identifier(value: object) -> str:
    if not isinstance(value, str):
        raise EventSchemaError(f"identifier must be a string, got {type(value).__name__}")
    ident = value.strip()
    if not ident:
        raise EventSchemaError("identifier must be non-empty")
    return ident


@dataclass(frozen=True)
class Event:
    ts: int
    kind: str
    peer: str | None = None
    duration_s: int | None = None
    domains: tuple[str, ...] | None = None
    session_start: int | None = None

    def to_dict(self) -> dict:
        out: dict = {"ts": self.ts, "kind": self.kind}
        if self.peer is not None:
            out["peer"] = self.peer
        if self.session_start is not None:
            out["session_start"] = self.session_start
        if self.duration_s is not None:
            out["duration_s"] = self.duration_s
        if self.domains is not None:
            out["domains"] = list(self.domains)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False)


def _int_field(record: dict, key: str, *, min_value: int = 0) -> int:
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise EventSchemaError(f"{key!r} must be an integer, got {value!r}")
    if value < min_value:
        raise EventSchemaError(f"{key!r} must be >= {min_value}, got {value}")
    return value


def event_from_dict(record: object) -> Event:
    """Validate a decoded JSON object and build an :class:`Event`."""
    if not isinstance(record, dict):
        raise EventSchemaError("event record must be a JSON object")
    for key in ("ts", "kind"):
        if key not in record:
            raise EventSchemaError(f"missing required key {key!r}")
    kind = record["kind"]
    if kind not in _KIND_KEYS:
        raise EventSchemaError(f"unknown event kind {kind!r}")

    expected = _KIND_KEYS[kind]
    present = set(record) - {"ts", "kind"}
    missing = expected - present
    extra = present - expected
    if missing:
        raise EventSchemaError(f"{kind}: missing key(s) {sorted(missing)}")
    if extra:
        raise EventSchemaError(f"{kind}: unexpected key(s) {sorted(extra)}")

    ts = _int_field(record, "ts")
    if kind == BROWSER_POLL:
        domains = record["domains"]
        if not isinstance(domains, list):
            raise EventSchemaError("'domains' must be an array of strings")
        return Event(ts, kind, domains=tuple(normalize_identifier(d) for d in domains))

    peer = normalize_identifier(record["peer"])
    if kind in SMS_KINDS:
        return Event(ts, kind, peer=peer)
    duration = _int_field(record, "duration_s")
    if kind in CALL_KINDS:
        return Event(ts, kind, peer=peer, duration_s=duration)

    start = _int_field(record, "session_start")
    if start > ts:
        raise EventSchemaError(f"wifi_session starts after it ends ({start} > {ts})")
    return Event(ts, kind, peer=peer, duration_s=duration, session_start=start)


def parse_event_line(line: str, lineno: int | None = None) -> Event:
    where = f"line {lineno}: " if lineno is not None else ""
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventParseError(f"{where}malformed JSON ({exc.msg}): {line.strip()[:80]!r}") from exc
    try:
        return event_from_dict(record)
    except EventSchemaError as exc:
        raise EventSchemaError(f"{where}{exc}") from None


def iter_events(lines: Iterable[str]) -> Iterator[Event]:
    """Parse JSON Lines, skipping blank lines. Line numbers are 1-based."""
    for lineno, line in enumerate(lines, start=1):
        if line.strip():
            yield parse_event_line(line, lineno)


def read_log(path: str | Path) -> list[Event]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_events(fh))


def format_log(events: Iterable[Event]) -> str:
    return "".join(ev.to_json() + "\n" for ev in events)


def write_log(path: str | Path, events: Iterable[Event]) -> None:
    Path(path).write_text(format_log(events), encoding="utf-8")


def load_contacts(text: str) -> frozenset[str]:
    """One identifier per line; blank lines ignored, whitespace trimmed."""
    return frozenset(s for s in (line.strip() for line in text.splitlines()) if s)


def read_contacts(path: str | Path) -> frozenset[str]:
    return load_contacts(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ValidationReport:
    first_decrease: int | None = None
    duration_mismatches: tuple[int, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.first_decrease is None and not self.duration_mismatches

    def describe(self) -> str:
        if self.ok:
            return "OK"
        parts = []
        if self.first_decrease is not None:
            parts.append(f"timestamp decreases at index {self.first_decrease}")
        if self.duration_mismatches:
            idx = ", ".join(str(i) for i in self.duration_mismatches[:10])
            more = "" if len(self.duration_mismatches) <= 10 else ", ..."
            parts.append(f"wifi_session duration_s != ts - session_start at index {idx}{more}")
        return "; ".join(parts)


def validate_log(events: Sequence[Event]) -> ValidationReport:
    first_decrease = None
    mismatches = []
    prev = None
    for i, ev in enumerate(events):
        if first_decrease is None and prev is not None and ev.ts < prev:
            first_decrease = i
        prev = ev.ts
        if ev.kind == WIFI_SESSION and ev.duration_s != ev.ts - ev.session_start:
            mismatches.append(i)
    return ValidationReport(first_decrease, tuple(mismatches))
