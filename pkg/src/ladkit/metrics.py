"""Window-relaxed anomaly scoring and latency summaries.

A labeled point anomaly at index Z is credited when any detection event
touches [Z-K, Z+K]; a labeled collective anomaly spanning [A, B] when any
event touches [A-K, B]. Consecutive flagged indices merge into one
detection event, and events are the unit for false positives. Precision,
recall and F-score follow the usual definitions with 0/0 -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, ContractError


@dataclass
class LabelSet:
    """Ground-truth anomalies: point indices and closed collective ranges."""

    point_anomalies: list[int] = field(default_factory=list)
    collective_anomalies: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        for a, b in self.collective_anomalies:
            if a > b:
                raise ContractError(f"collective range ({a}, {b}) has start > end")
        self.point_anomalies = sorted(self.point_anomalies)
        self.collective_anomalies = _merge_ranges(self.collective_anomalies)

    @property
    def total(self) -> int:
        return len(self.point_anomalies) + len(self.collective_anomalies)


def _merge_ranges(ranges: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    # Overlapping ranges collapse into one anomaly; adjacent ones stay
    # distinct (they are separate labeled events).
    out: list[tuple[int, int]] = []
    for a, b in sorted(ranges):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((int(a), int(b)))
    return out


@dataclass(frozen=True)
class MatchPolicy:
    """Window slack K for relaxed matching."""

    k: int = 7

    def __post_init__(self):
        if self.k < 0:
            raise ConfigError("k must be >= 0")


@dataclass
class TimingSummary:
    """Mean/population-std of per-point latency, split by whether the
    step included a model retrain (ADT-NT vs ADT-T)."""

    adt_nt_mean: float = 0.0
    adt_nt_std: float = 0.0
    adt_nt_count: int = 0
    adt_t_mean: float = 0.0
    adt_t_std: float = 0.0
    adt_t_count: int = 0


@dataclass
class MetricsReport:
    """One run's evaluation block, column-compatible with the comparison
    table (accuracy, training ratio, latency)."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    precision: float = 0.0
    recall: float = 0.0
    fscore: float = 0.0
    training_ratio: float = 0.0
    adt_nt_mean: float = 0.0
    adt_nt_std: float = 0.0
    adt_nt_count: int = 0
    adt_t_mean: float = 0.0
    adt_t_std: float = 0.0
    adt_t_count: int = 0


def choose_k(interval_seconds: float) -> int:
    """Window slack from the sampling interval: 7 for minute-scale
    series (up to half an hour), 3 for hourly and slower."""
    if not (interval_seconds > 0):
        raise ContractError("interval_seconds must be positive")
    return 7 if interval_seconds <= 1800.0 else 3


def merge_events(flags: Sequence[int]) -> list[tuple[int, int]]:
    """Collapse sorted unique flagged indices into maximal closed runs."""
    events: list[tuple[int, int]] = []
    for idx in flags:
        if events and idx == events[-1][1] + 1:
            events[-1] = (events[-1][0], idx)
        elif events and idx <= events[-1][1]:
            raise ContractError("flags must be sorted unique indices")
        else:
            events.append((idx, idx))
    return events


def match(labels: LabelSet, events: Sequence[tuple[int, int]], policy: MatchPolicy) -> tuple[int, int, int]:
    """Count (tp, fp, fn) under window-relaxed matching.

    Each labeled anomaly counts once; an event may satisfy several
    anomalies and an event touching no acceptance window is one FP.
    Adjacent/overlapping events are first merged into maximal runs, so
    the result depends only on the flagged index set, not on how it was
    split into events.
    """
    k = policy.k
    windows = [(z - k, z + k) for z in labels.point_anomalies]
    windows += [(a - k, b) for a, b in labels.collective_anomalies]

    runs: list[list[int]] = []
    for s, e in sorted(events):
        if runs and s <= runs[-1][1] + 1:
            runs[-1][1] = max(runs[-1][1], e)
        else:
            runs.append([s, e])

    tp = 0
    used = [False] * len(runs)
    for lo, hi in windows:
        hit = False
        for j, (s, e) in enumerate(runs):
            if s <= hi and e >= lo:
                hit = True
                used[j] = True
        if hit:
            tp += 1
    fp = used.count(False)
    fn = len(windows) - tp
    return tp, fp, fn


def f_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both vanish."""
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def scores(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """(precision, recall, fscore) with the 0/0 -> 0 convention."""
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return precision, recall, f_score(precision, recall)


def training_ratio(retrain_count: int, total_points: int) -> float:
    """Fraction of points whose step required training a model."""
    if total_points <= 0:
        raise ContractError("total_points must be positive")
    if not (0 <= retrain_count <= total_points):
        raise ContractError("retrain_count must lie in [0, total_points]")
    return retrain_count / total_points


def _mean_std(xs: list[float]) -> tuple[float, float]:
    if not xs:
        return 0.0, 0.0
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / len(xs)
    return mean, math.sqrt(var)


def timing_summary(verdicts) -> TimingSummary:
    """Latency split over non-bootstrap verdicts: steps without a retrain
    (ADT-NT) versus steps that trained a model (ADT-T)."""
    nt = [v.elapsed_seconds for v in verdicts if v.phase == "normal" and not v.retrained]
    tt = [v.elapsed_seconds for v in verdicts if v.phase == "normal" and v.retrained]
    nt_mean, nt_std = _mean_std(nt)
    t_mean, t_std = _mean_std(tt)
    return TimingSummary(
        adt_nt_mean=nt_mean, adt_nt_std=nt_std, adt_nt_count=len(nt),
        adt_t_mean=t_mean, adt_t_std=t_std, adt_t_count=len(tt),
    )
