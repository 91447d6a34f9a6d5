"""Pinned synthetic scenarios used by the test-suite and the examples.

``drifting_phases`` models a new phone: two sparse days dominated by
unfamiliar identifiers, three days of routine, then a change of workplace
(new SSID, different sites, shifted contacts). Attacks start at 15:00:00 UTC
on the eighth day.
"""

from __future__ import annotations

from .simulate import AttackSpec, Phase, ProfileSpec, generate_legitimate, inject_attack, utc_ts

LOG_START = utc_ts(2015, 2, 2)
ATTACK_START = utc_ts(2015, 2, 10, 15, 0, 0)
LOG_END = utc_ts(2015, 2, 10, 21, 0, 0)

# seeds of the shipped adversary fixtures
ADVERSARY_SEEDS = (11, 23, 37)
# seeds of the legitimate-only fixtures
LEGIT_SEEDS = tuple(range(100, 120))

ROUTINE = ProfileSpec()

ONBOARDING = ProfileSpec(
    daily_event_rate={"sms": 8.0, "call": 3.0, "browser": 20.0, "wifi": 2.0},
    novelty_rate=0.85,
)

NEW_JOB = ProfileSpec(
    contact_pool={
        "+447700900001": 6, "+447700900002": 4, "+447700900004": 3,
        "+447700900009": 4, "+447700900010": 2, "+447700900011": 1,
    },
    favorite_domains={
        "google.com": 8, "bbc.co.uk": 5, "github.com": 5, "docs.python.org": 4,
        "wikipedia.org": 2, "youtube.com": 3, "jira.example.com": 4, "ft.com": 2,
    },
    favorite_ssids={"HomeAP": 5, "NewOfficeAP": 4, "GymAP": 1},
)

# the address book: most routine peers, plus people who never get in touch;
# +447700900007/8 and +447700900011 are frequent but not saved
CONTACTS = frozenset({
    "+447700900001", "+447700900002", "+447700900003", "+447700900004",
    "+447700900005", "+447700900006", "+447700900009", "+447700900010",
    "+447700900099", "+447700900098",
})


def drifting_phases() -> list[Phase]:
    return [Phase(ONBOARDING, 2.0), Phase(ROUTINE, 3.0), Phase(NEW_JOB)]


def legitimate_log(seed: int, end_ts: int = LOG_END):
    return generate_legitimate(drifting_phases(), LOG_START, end_ts, seed=seed)


def attack_spec(case: str, seed: int, **kw) -> AttackSpec:
    return AttackSpec(start_ts=ATTACK_START, case=case, rng_seed=seed, **kw)


def adversary_log(case: str, seed: int):
    """Legitimate log for ``seed`` with the given attack case spliced in."""
    return inject_attack(legitimate_log(seed), attack_spec(case, seed))
