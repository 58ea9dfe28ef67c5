"""Online anomaly detection over a univariate stream (the RePAD scheme).

Each incoming point is forecast from the last ``b`` observed values with
the micro-LSTM; the forecast error feeds a sliding average absolute
relative error (AARE). When the AARE exceeds the self-adapting threshold
mu + 3*sigma over the AARE history, the model is retrained on the most
recent window and the point is re-scored; a point is only flagged
anomalous when even the fresh model cannot explain it. No offline
training phase: the first model is fitted once enough points exist.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, ContractError
from .lstm import BackendConfig, LstmModel, init_model, predict_next, train

PHASE_BOOTSTRAP = "bootstrap"
PHASE_NORMAL = "normal"

SIGMA_MULTIPLIER = 3.0


@dataclass(frozen=True)
class DetectorConfig:
    """Detector knobs. Only one-step-ahead prediction is supported."""

    look_back: int = 3
    predict_forward: int = 1
    hidden_size: int = 10
    epsilon_denominator: float = 1e-4
    backend: BackendConfig = field(default_factory=BackendConfig)

    def __post_init__(self):
        if self.predict_forward != 1:
            raise ConfigError("predict_forward must be 1")
        if self.look_back < 2:
            raise ConfigError("look_back must be >= 2")
        if self.hidden_size < 1:
            raise ConfigError("hidden_size must be >= 1")
        if not (self.epsilon_denominator > 0):
            raise ConfigError("epsilon_denominator must be positive")


@dataclass
class StreamingStats:
    """Single-pass (Welford) mean and population variance accumulator."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    @property
    def std(self) -> float:
        """Population standard deviation (sqrt(m2 / count))."""
        if self.count == 0:
            return 0.0
        return math.sqrt(max(self.m2, 0.0) / self.count)


def abs_rel_error(actual: float, predicted: float, eps: float) -> float:
    """|actual - predicted| / max(|actual|, eps); the eps guard keeps the
    score finite when the true value sits at or near zero."""
    return abs(actual - predicted) / max(abs(actual), eps)


def aare(recent_errors) -> float:
    """Arithmetic mean of a window of per-point absolute relative errors."""
    errs = list(recent_errors)
    if not errs:
        raise ContractError("aare needs at least one error term")
    return sum(errs) / len(errs)


def detection_threshold(stats: StreamingStats) -> Optional[float]:
    """mu + 3*sigma over the AARE history; undefined until two AARE
    values exist."""
    if stats.count < 2:
        return None
    return stats.mean + SIGMA_MULTIPLIER * stats.std


def ensure_increasing(last, timestamp):
    """Raise unless ``timestamp`` sorts strictly after ``last``; returns
    ``timestamp`` so callers can chain the assignment."""
    if last is not None:
        try:
            out_of_order = timestamp <= last
        except TypeError:
            raise ContractError(
                f"timestamp {timestamp!r} not comparable with previous {last!r}"
            ) from None
        if out_of_order:
            raise ContractError(
                f"timestamp {timestamp!r} not after previous {last!r}"
            )
    return timestamp


@dataclass
class PointVerdict:
    """Everything decided about one stream point."""

    index: int
    timestamp: object
    value: float
    predicted: Optional[float]
    aare: Optional[float]
    threshold: Optional[float]
    phase: str
    is_anomaly: bool
    retrained: bool
    elapsed_seconds: float


class RepadDetector:
    """Single-threaded detector state machine; one instance per stream.

    Feed points in timestamp order through :meth:`step`. Verdicts replay
    deterministically (everything except ``elapsed_seconds``) for equal
    configs and inputs. Attributes mirror the logical state: the current
    model, the ring of the last ``b`` values, the ring of their forecast
    errors, and running statistics over all emitted AARE values.
    """

    def __init__(self, config: DetectorConfig):
        self.config = config
        self.model: Optional[LstmModel] = None
        self.recent_values = deque(maxlen=config.look_back)
        self.recent_errors = deque(maxlen=config.look_back)
        self.aare_stats = StreamingStats()
        self.retrain_count = 0
        self.points_seen = 0
        self._last_timestamp = None

    def _fit(self, window) -> LstmModel:
        cfg = self.config
        fresh = init_model(cfg.backend, cfg.hidden_size)
        trained = train(fresh, window, cfg.backend)
        self.retrain_count += 1
        return trained

    def step(self, timestamp, value: float, index: Optional[int] = None) -> PointVerdict:
        """Consume one point and return its verdict.

        ``index`` defaults to the running point count; a caller embedding
        this machine (the two-phase detector does) may supply the index
        of the originating raw point so verdicts report source positions.
        """
        t0 = time.perf_counter()
        self._last_timestamp = ensure_increasing(self._last_timestamp, timestamp)
        b = self.config.look_back
        eps = self.config.epsilon_denominator
        idx = self.points_seen if index is None else index
        pos = self.points_seen

        if pos < b:
            # Not enough history to train or predict.
            self.recent_values.append(value)
            self.points_seen += 1
            return PointVerdict(
                index=idx, timestamp=timestamp, value=value, predicted=None,
                aare=None, threshold=None, phase=PHASE_BOOTSTRAP,
                is_anomaly=False, retrained=False,
                elapsed_seconds=time.perf_counter() - t0,
            )

        window = list(self.recent_values)
        retrained = False
        if pos <= 2 * b - 2:
            # Errors accumulate but a full AARE window does not exist yet.
            if self.model is None:
                self.model = self._fit(window)
                retrained = True
            predicted = predict_next(self.model, window)
            err = abs_rel_error(value, predicted, eps)
            self.recent_errors.append(err)
            self.recent_values.append(value)
            self.points_seen += 1
            return PointVerdict(
                index=idx, timestamp=timestamp, value=value, predicted=predicted,
                aare=None, threshold=None, phase=PHASE_BOOTSTRAP,
                is_anomaly=False, retrained=retrained,
                elapsed_seconds=time.perf_counter() - t0,
            )

        predicted = predict_next(self.model, window)
        err = abs_rel_error(value, predicted, eps)
        prior_errors = list(self.recent_errors)[-(b - 1):]
        score = aare(prior_errors + [err])
        thd = detection_threshold(self.aare_stats)
        is_anomaly = False
        if thd is not None and score > thd:
            # The model no longer explains the stream: retrain on the
            # current window and give the point a second chance. Exact
            # ties keep the model: on a bit-repeating stream the score
            # equals mu + 3*0 every step, and treating that as exceedance
            # would retrain and flag every point forever.
            self.model = self._fit(window)
            retrained = True
            predicted = predict_next(self.model, window)
            err = abs_rel_error(value, predicted, eps)
            score = aare(prior_errors + [err])
            is_anomaly = score > thd

        self.recent_errors.append(err)
        self.recent_values.append(value)
        self.aare_stats.push(score)
        self.points_seen += 1
        return PointVerdict(
            index=idx, timestamp=timestamp, value=value, predicted=predicted,
            aare=score, threshold=thd, phase=PHASE_NORMAL,
            is_anomaly=is_anomaly, retrained=retrained,
            elapsed_seconds=time.perf_counter() - t0,
        )


def new_detector(config: DetectorConfig) -> RepadDetector:
    """Construct an empty detector; no offline training happens here."""
    return RepadDetector(config)
