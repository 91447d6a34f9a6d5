"""Event-driven implicit authentication for mobile devices.

Behaviour events (SMS, calls, browsing, WiFi) are scored against decaying
per-feature familiarity lists, summed into an aggregate trust score, and
compared with an adaptive threshold to flag abnormal use.
"""

from .config import EngineConfig, load_config
from .decision import DecisionRecord, Verdict, classify
from .events import Event, load_contacts, parse_event_line, read_log, validate_log
from .kernels import BACKEND
from .evaluation import Metrics, compute_metrics, replay, sweep
from .scoring import AggregateScorePoint, ScoringEngine, score_stream

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AggregateScorePoint",
    "DecisionRecord",
    "EngineConfig",
    "Event",
    "Metrics",
    "ScoringEngine",
    "Verdict",
    "classify",
    "compute_metrics",
    "load_config",
    "load_contacts",
    "parse_event_line",
    "read_log",
    "replay",
    "score_stream",
    "sweep",
    "validate_log",
]
