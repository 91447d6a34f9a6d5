"""Engine configuration and its flat dotted-key JSON form.

A config file is a single JSON object such as::

    {"threshold.strategy": "ewma_sd_block", "threshold.alpha": 0.3, "decision.tolerance": 8}

Keys not listed in :data:`DEFAULTS` are rejected. Omitted keys keep their
defaults.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .cache import BROWSER_PARAMS, CALL_PARAMS, SMS_PARAMS, WIFI_PARAMS, CacheParams

BROWSER_POLL_INTERVAL_S = 20 * 60

STRATEGIES = ("static", "sd_block", "ewma_direct", "ewma_sd_block")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScoreWeights:
    sms_top5_points: float = 15.0
    sms_contact_points: float = 10.0
    call_top5_points: float = 15.0
    call_contact_points: float = 10.0
    call_long_duration_points: float = 10.0
    call_long_duration_threshold_s: int = 120
    browser_per_domain_points: float = 5.0
    browser_top_k: int = 6
    wifi_top5_points: float = 20.0
    wifi_min_session_s: int = 120
    sms_call_top_k: int = 5

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"scoring.{f.name} must be >= 0")
        if self.browser_top_k < 1 or self.sms_call_top_k < 1:
            raise ConfigError("top-k sizes must be positive")


@dataclass(frozen=True)
class CacheConfig:
    sms: CacheParams = SMS_PARAMS
    call: CacheParams = CALL_PARAMS
    browser: CacheParams = BROWSER_PARAMS
    wifi: CacheParams = WIFI_PARAMS


@dataclass(frozen=True)
class DampingConfig:
    mu: float = 0.5

    def __post_init__(self):
        if self.mu < 0:
            raise ConfigError("damping.mu must be >= 0")


@dataclass(frozen=True)
class ThresholdConfig:
    strategy: str = "ewma_direct"
    alpha: float = 0.2
    block_len_events: int = 50
    # training prefix for static / ewma_sd_block; an event count wins over days
    training_len_events: int | None = None
    training_len_days: float = 2.0
    asba_block_size: int = 8
    # 0 = population standard deviation, 1 = sample
    sd_ddof: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"threshold.strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"threshold.alpha must be in (0, 1], got {self.alpha}")
        if self.block_len_events < 1 or self.asba_block_size < 1:
            raise ConfigError("block sizes must be >= 1")
        if self.training_len_events is not None and self.training_len_events < 1:
            raise ConfigError("threshold.training_len_events must be >= 1")
        if self.training_len_days <= 0:
            raise ConfigError("threshold.training_len_days must be > 0")
        if self.sd_ddof not in (0, 1):
            raise ConfigError("threshold.sd_ddof must be 0 or 1")


@dataclass(frozen=True)
class DecisionConfig:
    tolerance: float = 10.0

    def __post_init__(self):
        if self.tolerance < 0:
            raise ConfigError("decision.tolerance must be >= 0")


@dataclass(frozen=True)
class EngineConfig:
    scoring: ScoreWeights = field(default_factory=ScoreWeights)
    cache: CacheConfig = field(default_factory=CacheConfig)
    damping: DampingConfig = field(default_factory=DampingConfig)
    threshold: ThresholdConfig = field(default_factory=ThresholdConfig)
    decision: DecisionConfig = field(default_factory=DecisionConfig)

    def to_flat(self) -> dict:
        flat = {}
        for section in ("scoring", "damping", "threshold", "decision"):
            for k, v in asdict(getattr(self, section)).items():
                flat[f"{section}.{k}"] = v
        for feat in ("sms", "call", "browser", "wifi"):
            p = getattr(self.cache, feat)
            flat[f"cache.{feat}.base"] = p.base
            flat[f"cache.{feat}.weight"] = p.weight
        return flat

    def with_overrides(self, overrides: dict) -> EngineConfig:
        return from_flat(overrides, base=self)


DEFAULTS = EngineConfig().to_flat()

_INT_KEYS = {
    "scoring.call_long_duration_threshold_s",
    "scoring.browser_top_k",
    "scoring.wifi_min_session_s",
    "scoring.sms_call_top_k",
    "threshold.block_len_events",
    "threshold.training_len_events",
    "threshold.asba_block_size",
    "threshold.sd_ddof",
}


def _coerce(key: str, value):
    if key == "threshold.strategy":
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string")
        return value
    if key == "threshold.training_len_events" and value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if key in _INT_KEYS:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def from_flat(overrides: dict, base: EngineConfig | None = None) -> EngineConfig:
    """Apply flat dotted-key overrides on top of ``base`` (defaults if None)."""
    unknown = sorted(set(overrides) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    flat = (base or EngineConfig()).to_flat()
    flat.update({k: _coerce(k, v) for k, v in overrides.items()})

    def section(name):
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in flat.items() if k.startswith(prefix) and k.count(".") == 1}

    try:
        caches = {
            feat: CacheParams(flat[f"cache.{feat}.base"], flat[f"cache.{feat}.weight"])
            for feat in ("sms", "call", "browser", "wifi")
        }
        return EngineConfig(
            scoring=ScoreWeights(**section("scoring")),
            cache=CacheConfig(**caches),
            damping=DampingConfig(**section("damping")),
            threshold=ThresholdConfig(**section("threshold")),
            decision=DecisionConfig(**section("decision")),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return from_flat(data)


__all__ = [
    "BROWSER_POLL_INTERVAL_S",
    "STRATEGIES",
    "CacheConfig",
    "ConfigError",
    "DampingConfig",
    "DecisionConfig",
    "EngineConfig",
    "ScoreWeights",
    "ThresholdConfig",
    "from_flat",
    "load_config",
]
