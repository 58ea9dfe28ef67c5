"""Two-phase detection for recurrent series (the SALAD scheme).

Phase one converts the raw series into a stream of AARE values on the
fly using a long look-back forecaster (window ``B``, e.g. a full season);
phase two runs the ordinary RePAD machine over that AARE stream, so a raw
point is anomalous exactly when its AARE value is. The conversion
forecaster self-adapts with the same mu + 3*sigma retrain trigger the
detection phase uses.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import ConfigError
from .lstm import BackendConfig, LstmModel, init_model, predict_next, train
from .repad import (
    DetectorConfig,
    PointVerdict,
    RepadDetector,
    StreamingStats,
    abs_rel_error,
    aare,
    detection_threshold,
    ensure_increasing,
)

PHASE_CONVERSION_BOOTSTRAP = "conversion_bootstrap"
PHASE_ACTIVE = "active"


def _default_detection_config() -> DetectorConfig:
    return DetectorConfig(backend=BackendConfig(learning_rate=0.001, epochs=50))


@dataclass(frozen=True)
class SaladConfig:
    """Conversion-phase window/backend plus the inner detector config."""

    conversion_look_back: int
    conversion_hidden_size: int = 10
    conversion_backend: BackendConfig = field(
        default_factory=lambda: BackendConfig(learning_rate=0.001, epochs=100)
    )
    detection: DetectorConfig = field(default_factory=_default_detection_config)

    def __post_init__(self):
        if self.conversion_look_back < 2:
            raise ConfigError("conversion_look_back must be >= 2")
        if self.conversion_hidden_size < 1:
            raise ConfigError("conversion_hidden_size must be >= 1")


@dataclass
class SaladVerdict:
    """Per-raw-point outcome: conversion output plus, once the converter
    emits AARE values, the inner detector's verdict for this index."""

    index: int
    timestamp: object
    raw_value: float
    predicted_raw: Optional[float]
    conversion_aare: Optional[float]
    inner_verdict: Optional[PointVerdict]
    phase: str
    elapsed_conversion_seconds: float
    elapsed_detection_seconds: float


class SaladDetector:
    """Conversion forecaster + embedded RePAD machine, one per stream.

    ``predictor`` is a test seam: when set, it is called with the current
    window instead of the LSTM (and no conversion training happens), so
    tests can inject a perfect forecaster.
    """

    def __init__(
        self,
        config: SaladConfig,
        predictor: Optional[Callable[[Sequence[float]], float]] = None,
    ):
        self.config = config
        self.conversion_model: Optional[LstmModel] = None
        self.conversion_ring = deque(maxlen=config.conversion_look_back)
        self.conversion_errors = deque(maxlen=config.conversion_look_back)
        self.conversion_stats = StreamingStats()
        self.conversion_train_count = 0
        self.points_seen = 0
        self.inner = RepadDetector(config.detection)
        self.predictor = predictor
        self._last_timestamp = None

    def _predict(self, window) -> float:
        if self.predictor is not None:
            return float(self.predictor(window))
        return predict_next(self.conversion_model, window)

    def _fit(self, window) -> None:
        if self.predictor is not None:
            return
        cfg = self.config
        fresh = init_model(cfg.conversion_backend, cfg.conversion_hidden_size)
        self.conversion_model = train(fresh, window, cfg.conversion_backend)
        self.conversion_train_count += 1

    def convert_step(self, timestamp, value: float) -> tuple[Optional[float], Optional[float]]:
        """Advance the conversion phase by one raw point.

        Returns (predicted_raw, emitted_aare); both are None while the
        phase is still accumulating history. Mirrors the RePAD step
        structure at window size B, including retrain-and-rescore when
        the AARE reaches the conversion threshold.
        """
        self._last_timestamp = ensure_increasing(self._last_timestamp, timestamp)
        b = self.config.conversion_look_back
        pos = self.points_seen
        self.points_seen += 1

        if pos < b:
            self.conversion_ring.append(value)
            return None, None

        window = list(self.conversion_ring)
        if self.conversion_model is None and self.predictor is None:
            self._fit(window)
        predicted = self._predict(window)
        eps = self.config.detection.epsilon_denominator
        err = abs_rel_error(value, predicted, eps)

        if pos <= 2 * b - 2:
            self.conversion_errors.append(err)
            self.conversion_ring.append(value)
            return predicted, None

        prior_errors = list(self.conversion_errors)[-(b - 1):]
        score = aare(prior_errors + [err])
        thd = detection_threshold(self.conversion_stats)
        # Same strict-exceedance rule as the detection machine.
        if thd is not None and score > thd and self.predictor is None:
            self._fit(window)
            predicted = self._predict(window)
            err = abs_rel_error(value, predicted, eps)
            score = aare(prior_errors + [err])

        self.conversion_errors.append(err)
        self.conversion_ring.append(value)
        self.conversion_stats.push(score)
        return predicted, score

    def step(self, timestamp, value: float) -> SaladVerdict:
        """Consume one raw point: convert, then feed any emitted AARE to
        the inner detector. Raw-series indices carry through to the inner
        verdicts so flagged events report source positions."""
        idx = self.points_seen
        t0 = time.perf_counter()
        predicted, emitted = self.convert_step(timestamp, value)
        t1 = time.perf_counter()

        inner_verdict = None
        detect_elapsed = 0.0
        if emitted is not None:
            inner_verdict = self.inner.step(timestamp, emitted, index=idx)
            detect_elapsed = inner_verdict.elapsed_seconds

        return SaladVerdict(
            index=idx,
            timestamp=timestamp,
            raw_value=value,
            predicted_raw=predicted,
            conversion_aare=emitted,
            inner_verdict=inner_verdict,
            phase=PHASE_ACTIVE if emitted is not None else PHASE_CONVERSION_BOOTSTRAP,
            elapsed_conversion_seconds=t1 - t0,
            elapsed_detection_seconds=detect_elapsed,
        )


def new_salad(config: SaladConfig) -> SaladDetector:
    """Construct an empty two-phase detector."""
    return SaladDetector(config)
