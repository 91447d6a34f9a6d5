"""Normal/abnormal classification with an error-tolerance band.

A score below the threshold by no more than ``tolerance`` still counts as
normal; only scores under ``threshold - tolerance`` (the virtual threshold)
are abnormal. ``AS == threshold`` is normal.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable


class Verdict(str, enum.Enum):
    NORMAL = "normal"
    ABNORMAL = "abnormal"
    WARMUP = "warmup"

    def __str__(self):
        return self.value


# kernel verdict codes -> Verdict
VERDICT_CODES = (Verdict.WARMUP, Verdict.NORMAL, Verdict.ABNORMAL)


def classify(as_value: float, threshold: float | None, tolerance: float) -> Verdict:
    if threshold is None or math.isnan(threshold):
        return Verdict.WARMUP
    if as_value >= threshold:
        return Verdict.NORMAL
    if as_value >= threshold - tolerance:
        return Verdict.NORMAL
    return Verdict.ABNORMAL


@dataclass(frozen=True)
class DecisionRecord:
    index: int
    ts: int
    aggregate_score: float
    threshold: float | None
    virtual_threshold: float | None
    verdict: Verdict


def make_record(index: int, ts: int, as_value: float, threshold: float | None,
                tolerance: float) -> DecisionRecord:
    verdict = classify(as_value, threshold, tolerance)
    if verdict is Verdict.WARMUP:
        return DecisionRecord(index, ts, as_value, None, None, verdict)
    return DecisionRecord(index, ts, as_value, threshold, threshold - tolerance, verdict)


DECISION_CSV_HEADER = "index,ts,aggregate_score,threshold,virtual_threshold,verdict"


def _num(x: float | None) -> str:
    return "warmup" if x is None else f"{x:.6f}"


def format_decision_csv(records: Iterable[DecisionRecord]) -> str:
    lines = [DECISION_CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.index},{r.ts},{r.aggregate_score:.6f},{_num(r.threshold)},"
            f"{_num(r.virtual_threshold)},{r.verdict.value}"
        )
    return "\n".join(lines) + "\n"


THRESHOLD_CSV_HEADER = "index,ts,threshold,warmup"


def format_threshold_csv(records: Iterable[DecisionRecord]) -> str:
    lines = [THRESHOLD_CSV_HEADER]
    for r in records:
        if r.threshold is None:
            lines.append(f"{r.index},{r.ts},,true")
        else:
            lines.append(f"{r.index},{r.ts},{r.threshold:.6f},false")
    return "\n".join(lines) + "\n"
