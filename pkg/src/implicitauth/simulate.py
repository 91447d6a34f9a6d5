"""Seeded synthetic event logs: a legitimate owner and a device thief.

Legitimate activity is a set of independent Poisson processes (one per
feature) thinned to waking hours. Identifiers come from weighted pools, or
are freshly minted with probability ``novelty_rate``. Browsing is sampled as
individual visits and reported as ``browser_poll`` events on the fixed poll
grid, one poll per grid slot that saw at least one visit.

An attack removes every legitimate event from ``start_ts`` on and replaces
them with interactions by someone using identifiers the device has never
seen. All randomness comes from :class:`random.Random` seeded explicitly.
"""

from __future__ import annotations

import calendar
import json
import random
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from . import events as ev
from .config import BROWSER_POLL_INTERVAL_S, ConfigError

FEATURE_KINDS = ("sms", "call", "browser", "wifi")

# fresh identifiers are minted under these prefixes, so owner novelties and
# attacker identifiers can never collide
_OWNER_FRESH = {"phone": "+4478", "domain": ".example.net", "ssid": "AP-"}
_ATTACKER_FRESH = {"phone": "+4475", "domain": ".example.org", "ssid": "ATK-"}


def _pool(value) -> tuple[tuple[str, float], ...]:
    if isinstance(value, dict):
        items = value.items()
    else:
        items = value
    return tuple((str(k), float(w)) for k, w in items)


@dataclass(frozen=True)
class ProfileSpec:
    contact_pool: tuple[tuple[str, float], ...] = (
        ("+447700900001", 6), ("+447700900002", 5), ("+447700900003", 3),
        ("+447700900004", 2), ("+447700900005", 2), ("+447700900006", 1),
        ("+447700900007", 1), ("+447700900008", 1),
    )
    favorite_domains: tuple[tuple[str, float], ...] = (
        ("bbc.co.uk", 6), ("google.com", 8), ("github.com", 4), ("wikipedia.org", 3),
        ("theguardian.com", 3), ("youtube.com", 4), ("amazon.co.uk", 2),
        ("stackoverflow.com", 2), ("reddit.com", 2), ("weather.com", 1),
    )
    favorite_ssids: tuple[tuple[str, float], ...] = (("HomeAP", 5), ("WorkAP", 4), ("CafeAP", 1))
    # mean events per day; browser counts individual page visits
    daily_event_rate: tuple[tuple[str, float], ...] = (
        ("sms", 14.0), ("call", 5.0), ("browser", 40.0), ("wifi", 4.0),
    )
    call_duration_mean_s: float = 180.0
    wifi_duration_mean_s: float = 3600.0
    novelty_rate: float = 0.1
    active_hours: tuple[int, int] = (7, 23)
    browser_poll_interval_s: int = BROWSER_POLL_INTERVAL_S
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "contact_pool", _pool(self.contact_pool))
        object.__setattr__(self, "favorite_domains", _pool(self.favorite_domains))
        object.__setattr__(self, "favorite_ssids", _pool(self.favorite_ssids))
        object.__setattr__(self, "daily_event_rate", _pool(self.daily_event_rate))
        object.__setattr__(self, "active_hours", tuple(int(h) for h in self.active_hours))
        for name in ("contact_pool", "favorite_domains", "favorite_ssids"):
            if any(w <= 0 for _, w in getattr(self, name)):
                raise ConfigError(f"profile.{name}: weights must be positive")
        rates = dict(self.daily_event_rate)
        unknown = set(rates) - set(FEATURE_KINDS)
        if unknown:
            raise ConfigError(f"profile.daily_event_rate: unknown kind(s) {sorted(unknown)}")
        if any(r < 0 for r in rates.values()):
            raise ConfigError("profile.daily_event_rate: rates must be >= 0")
        if not 0 <= self.novelty_rate <= 1:
            raise ConfigError("profile.novelty_rate must be in [0, 1]")
        lo, hi = self.active_hours
        if not 0 <= lo < hi <= 24:
            raise ConfigError("profile.active_hours must satisfy 0 <= start < end <= 24")
        if self.browser_poll_interval_s < 1:
            raise ConfigError("profile.browser_poll_interval_s must be >= 1")
        if self.novelty_rate < 1:
            needed = {"sms": "contact_pool", "call": "contact_pool",
                      "browser": "favorite_domains", "wifi": "favorite_ssids"}
            for kind, pool in needed.items():
                if rates.get(kind, 0) > 0 and not getattr(self, pool):
                    raise ConfigError(f"profile.{pool} is empty but novelty_rate < 1")

    def rate(self, kind: str) -> float:
        return dict(self.daily_event_rate).get(kind, 0.0)

    @property
    def contacts(self) -> frozenset[str]:
        return frozenset(peer for peer, _ in self.contact_pool)


def profile_from_dict(data: dict) -> ProfileSpec:
    names = {f.name for f in fields(ProfileSpec)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown profile key(s): {', '.join(unknown)}")
    try:
        return ProfileSpec(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid profile: {exc}") from exc


@dataclass(frozen=True)
class Phase:
    profile: ProfileSpec
    # None: runs to the end of the requested span
    duration_days: float | None = None


def profile_phases(data: dict) -> list[Phase]:
    """Profile phases from decoded JSON.

    Either a flat profile object, or ``{"phases": [{"duration_days": 2,
    "profile": {...}}, ...]}`` for a behaviour that drifts over time.
    """
    if not isinstance(data, dict):
        raise ConfigError("profile must be a JSON object")
    if "phases" not in data:
        return [Phase(profile_from_dict(data))]
    if set(data) != {"phases"} or not isinstance(data["phases"], list) or not data["phases"]:
        raise ConfigError("'phases' must be the only key and a non-empty list")
    phases = []
    for item in data["phases"]:
        if not isinstance(item, dict):
            raise ConfigError("each phase must be a JSON object")
        extra = set(item) - {"profile", "duration_days"}
        if extra:
            raise ConfigError(f"unknown phase key(s): {sorted(extra)}")
        phases.append(Phase(profile_from_dict(item.get("profile", {})), item.get("duration_days")))
    return phases


def load_profile(path: str | Path) -> list[Phase]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    return profile_phases(data)


class _Minter:
    def __init__(self, rng: random.Random, prefixes: dict[str, str]):
        self.rng = rng
        self.prefixes = prefixes

    def phone(self) -> str:
        return f"{self.prefixes['phone']}{self.rng.randrange(10**8):08d}"

    def domain(self) -> str:
        return f"{self.rng.getrandbits(32):08x}{self.prefixes['domain']}"

    def ssid(self) -> str:
        return f"{self.prefixes['ssid']}{self.rng.getrandbits(24):06X}"


def _weighted(rng: random.Random, pool: Sequence[tuple[str, float]]) -> str:
    ids = [k for k, _ in pool]
    weights = [w for _, w in pool]
    return rng.choices(ids, weights=weights)[0]


def _arrivals(rng: random.Random, daily_rate: float, start: int, end: int,
              active_hours: tuple[int, int]) -> list[int]:
    """Poisson arrival times in [start, end) restricted to active hours (UTC)."""
    if daily_rate <= 0:
        return []
    lo, hi = active_hours
    per_second = daily_rate / ((hi - lo) * 3600.0)
    out = []
    t = float(start)
    while True:
        t += rng.expovariate(per_second)
        if t >= end:
            return out
        hour = (int(t) % 86400) // 3600
        if lo <= hour < hi:
            out.append(int(t))
        else:
            # skip to the next active window
            day = int(t) - int(t) % 86400
            t = float(day + lo * 3600 if hour < lo else day + 86400 + lo * 3600)


def _grid_ceil(t: int, interval: int) -> int:
    return -(-t // interval) * interval


def _generate_phase(rng: random.Random, profile: ProfileSpec, start: int, end: int) -> list[ev.Event]:
    mint = _Minter(rng, _OWNER_FRESH)
    nov = profile.novelty_rate

    def pick(pool, fresh):
        if nov >= 1 or rng.random() < nov:
            return fresh()
        return _weighted(rng, pool)

    out: list[ev.Event] = []
    for t in _arrivals(rng, profile.rate("sms"), start, end, profile.active_hours):
        kind = ev.SMS_IN if rng.random() < 0.5 else ev.SMS_OUT
        out.append(ev.Event(t, kind, peer=pick(profile.contact_pool, mint.phone)))

    for t in _arrivals(rng, profile.rate("call"), start, end, profile.active_hours):
        kind = ev.CALL_IN if rng.random() < 0.5 else ev.CALL_OUT
        peer = pick(profile.contact_pool, mint.phone)
        duration = max(1, int(rng.expovariate(1.0 / profile.call_duration_mean_s)))
        out.append(ev.Event(t, kind, peer=peer, duration_s=duration))

    polls: dict[int, list[str]] = {}
    interval = profile.browser_poll_interval_s
    for t in _arrivals(rng, profile.rate("browser"), start, end, profile.active_hours):
        polls.setdefault(_grid_ceil(t, interval), []).append(pick(profile.favorite_domains, mint.domain))
    for t, domains in polls.items():
        if t < end:
            out.append(ev.Event(t, ev.BROWSER_POLL, domains=tuple(domains)))

    for t in _arrivals(rng, profile.rate("wifi"), start, end, profile.active_hours):
        ssid = pick(profile.favorite_ssids, mint.ssid)
        duration = int(rng.expovariate(1.0 / profile.wifi_duration_mean_s))
        if t + duration < end:
            out.append(ev.Event(t + duration, ev.WIFI_SESSION, peer=ssid,
                                duration_s=duration, session_start=t))
    return out


def generate_legitimate(profile: ProfileSpec | Sequence[Phase], start_ts: int, end_ts: int,
                        seed: int | None = None) -> list[ev.Event]:
    """Seeded owner activity over ``[start_ts, end_ts)``, sorted by time.

    ``profile`` is one :class:`ProfileSpec` or a list of phases played back
    to back. ``seed`` overrides the (first) profile's ``rng_seed``.
    """
    if start_ts >= end_ts:
        raise ConfigError(f"empty span: start {start_ts} >= end {end_ts}")
    phases = [Phase(profile)] if isinstance(profile, ProfileSpec) else list(profile)
    if not phases:
        raise ConfigError("no profile phases given")
    rng = random.Random(phases[0].profile.rng_seed if seed is None else seed)
    out: list[ev.Event] = []
    t0 = start_ts
    for i, phase in enumerate(phases):
        last = i == len(phases) - 1
        if last or phase.duration_days is None:
            t1 = end_ts
        else:
            t1 = min(end_ts, t0 + int(round(phase.duration_days * 86400)))
        if t1 > t0:
            out.extend(_generate_phase(rng, phase.profile, t0, t1))
        t0 = t1
        if t0 >= end_ts:
            break
    out.sort(key=lambda e: e.ts)
    return out


class AttackError(ValueError):
    pass


CASE_INTEREVENT_MIN = {"case1": 12.0, "case2": 2.0}
ATTACK_KINDS = FEATURE_KINDS


@dataclass(frozen=True)
class AttackSpec:
    start_ts: int
    case: str = "case1"
    # None: the case default (12 min for case1, 2 min for case2)
    mean_interevent: float | None = None
    duration: float = 240.0
    # per-feature attacker identifiers; minted from the seed when empty
    identifier_pool: tuple[tuple[str, tuple[str, ...]], ...] = ()
    pool_size: int = 5
    call_duration_mean_s: float = 90.0
    wifi_duration_mean_s: float = 900.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.case not in CASE_INTEREVENT_MIN:
            raise ConfigError(f"attack.case must be one of {sorted(CASE_INTEREVENT_MIN)}")
        if isinstance(self.identifier_pool, dict):
            object.__setattr__(self, "identifier_pool", tuple(
                (k, tuple(v)) for k, v in sorted(self.identifier_pool.items())))
        if self.interevent_minutes <= 0 or self.duration <= 0:
            raise ConfigError("attack cadence and duration must be positive")
        if self.pool_size < 1:
            raise ConfigError("attack.pool_size must be >= 1")

    @property
    def interevent_minutes(self) -> float:
        if self.mean_interevent is None:
            return CASE_INTEREVENT_MIN[self.case]
        return float(self.mean_interevent)

    def pools(self, rng: random.Random) -> dict[str, tuple[str, ...]]:
        given = dict(self.identifier_pool)
        mint = _Minter(rng, _ATTACKER_FRESH)
        makers = {"sms": mint.phone, "call": mint.phone, "browser": mint.domain, "wifi": mint.ssid}
        return {
            k: tuple(given[k]) if given.get(k) else tuple(makers[k]() for _ in range(self.pool_size))
            for k in ATTACK_KINDS
        }


def attack_from_dict(data: dict, **overrides) -> AttackSpec:
    data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    names = {f.name for f in fields(AttackSpec)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown attack key(s): {', '.join(unknown)}")
    if "start_ts" not in data:
        raise ConfigError("attack spec needs 'start_ts'")
    try:
        return AttackSpec(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid attack spec: {exc}") from exc


def attacker_events(attack: AttackSpec) -> list[ev.Event]:
    """The thief's activity alone, sorted by time."""
    rng = random.Random(attack.rng_seed)
    pools = attack.pools(rng)
    start = attack.start_ts
    end = start + attack.duration * 60.0
    rate = 1.0 / (attack.interevent_minutes * 60.0)
    out: list[ev.Event] = []
    polls: dict[int, list[str]] = {}
    t = float(start)
    while True:
        t += rng.expovariate(rate)
        if t >= end:
            break
        ts = int(t)
        kind = ATTACK_KINDS[rng.randrange(len(ATTACK_KINDS))]
        ident = pools[kind][rng.randrange(len(pools[kind]))]
        if kind == "sms":
            out.append(ev.Event(ts, ev.SMS_OUT, peer=ident))
        elif kind == "call":
            duration = max(1, int(rng.expovariate(1.0 / attack.call_duration_mean_s)))
            out.append(ev.Event(ts, ev.CALL_OUT, peer=ident, duration_s=duration))
        elif kind == "browser":
            polls.setdefault(_grid_ceil(ts, BROWSER_POLL_INTERVAL_S), []).append(ident)
        else:
            duration = 120 + int(rng.expovariate(1.0 / attack.wifi_duration_mean_s))
            out.append(ev.Event(ts + duration, ev.WIFI_SESSION, peer=ident,
                                duration_s=duration, session_start=ts))
    for t_poll, domains in polls.items():
        out.append(ev.Event(t_poll, ev.BROWSER_POLL, domains=tuple(domains)))
    out.sort(key=lambda e: e.ts)
    return out


def inject_attack(events: Sequence[ev.Event], attack: AttackSpec) -> list[ev.Event]:
    """Replace everything from ``attack.start_ts`` on with attacker activity."""
    if not events:
        raise AttackError("cannot inject an attack into an empty log")
    if not events[0].ts <= attack.start_ts <= events[-1].ts:
        raise AttackError(
            f"attack start {attack.start_ts} outside log span [{events[0].ts}, {events[-1].ts}]"
        )
    kept = [e for e in events if e.ts < attack.start_ts]
    return kept + attacker_events(attack)


def attacker_identifiers(attack: AttackSpec) -> frozenset[str]:
    return frozenset(i for pool in attack.pools(random.Random(attack.rng_seed)).values() for i in pool)


def utc_ts(year: int, month: int, day: int, hour: int = 0, minute: int = 0, second: int = 0) -> int:
    return calendar.timegm((year, month, day, hour, minute, second, 0, 0, 0))


__all__ = [
    "AttackError",
    "AttackSpec",
    "Phase",
    "ProfileSpec",
    "attack_from_dict",
    "attacker_events",
    "attacker_identifiers",
    "generate_legitimate",
    "inject_attack",
    "load_profile",
    "profile_from_dict",
    "profile_phases",
    "utc_ts",
]
