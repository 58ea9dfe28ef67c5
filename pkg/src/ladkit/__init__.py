"""Online adaptive lightweight time-series anomaly detection.

Streaming detectors (single-phase and two-phase) over an embedded
micro-LSTM forecaster, a window-relaxed evaluation suite, file I/O for
series/labels/run outputs, and a benchmark runner. Served over HTTP by
:mod:`ladkit.service` and driven by the ``ladkit`` CLI.
"""

from .errors import (
    ConfigError,
    ContractError,
    LadkitError,
    NumericOverflowError,
    ParseError,
)
from .lstm import (
    BackendConfig,
    LstmModel,
    backprop,
    dump_model,
    forward,
    init_model,
    predict_next,
    train,
)
from .metrics import (
    LabelSet,
    MatchPolicy,
    MetricsReport,
    choose_k,
    f_score,
    match,
    merge_events,
    scores,
    timing_summary,
    training_ratio,
)
from .repad import (
    DetectorConfig,
    PointVerdict,
    RepadDetector,
    StreamingStats,
    aare,
    abs_rel_error,
    detection_threshold,
    new_detector,
)
from .salad import SaladConfig, SaladDetector, SaladVerdict, new_salad
from .dataio import TimeSeries, duplicate, load_csv, load_labels, tile_labels, write_outputs
from .runner import RunSpec, compare, run

__version__ = "0.1.0"

__all__ = [
    "BackendConfig", "ConfigError", "ContractError", "DetectorConfig",
    "LabelSet", "LadkitError", "LstmModel", "MatchPolicy", "MetricsReport",
    "NumericOverflowError", "ParseError", "PointVerdict", "RepadDetector",
    "RunSpec", "SaladConfig", "SaladDetector", "SaladVerdict", "StreamingStats",
    "TimeSeries", "aare", "abs_rel_error", "backprop", "choose_k", "compare",
    "detection_threshold", "dump_model", "duplicate", "f_score", "forward", "init_model",
    "load_csv", "load_labels", "match", "merge_events", "new_detector",
    "new_salad", "predict_next", "run", "scores", "tile_labels",
    "timing_summary", "train", "training_ratio", "write_outputs",
]
