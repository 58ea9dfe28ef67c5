"""Run a detector over a series file and evaluate it; compare variants.

This is the orchestration layer both the HTTP service and the CLI call
into: load + duplicate the series, tile the labels, stream every point
through the detector with per-step wall timing, score flagged events
against the labels, and emit the output files.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import dataio, metrics, presets
from .errors import ConfigError
from .metrics import LabelSet, MatchPolicy, MetricsReport
from .repad import PointVerdict, RepadDetector
from .salad import SaladDetector


@dataclass
class RunSpec:
    """One detector run: input, config source, evaluation knobs."""

    algorithm: str
    input_path: str
    labels_path: Optional[str] = None
    preset: Optional[str] = None
    overrides: dict = field(default_factory=dict)
    duplicate_n: int = 1
    k: Optional[int] = None
    seed: Optional[int] = None
    out_dir: Optional[str] = None
    name: str = "run"


@dataclass
class RunResult:
    name: str
    report: MetricsReport
    report_doc: dict
    verdict_rows: list
    files: list[str]


def _flatten_salad(verdicts) -> list[PointVerdict]:
    """SaladVerdicts into the common verdict-row shape: raw value and
    conversion forecast, emitted AARE, inner detector decision fields."""
    rows = []
    for sv in verdicts:
        inner = sv.inner_verdict
        rows.append(PointVerdict(
            index=sv.index,
            timestamp=sv.timestamp,
            value=sv.raw_value,
            predicted=sv.predicted_raw,
            aare=sv.conversion_aare,
            threshold=inner.threshold if inner else None,
            phase=sv.phase,
            is_anomaly=inner.is_anomaly if inner else False,
            retrained=inner.retrained if inner else False,
            elapsed_seconds=sv.elapsed_conversion_seconds + sv.elapsed_detection_seconds,
        ))
    return rows


def run(spec: RunSpec) -> RunResult:
    """Execute one spec end to end. Timing happens inside the stepping
    loop on this thread; callers wanting uncontended latency numbers must
    not run anything else concurrently."""
    if spec.duplicate_n < 1:
        raise ConfigError("duplicate_n must be >= 1")
    flat = presets.effective_flat(spec.algorithm, spec.preset, spec.overrides, seed=spec.seed)

    series = dataio.load_csv(spec.input_path)
    original_len = len(series)
    if spec.duplicate_n > 1:
        series = dataio.duplicate(series, spec.duplicate_n)

    labels = None
    if spec.labels_path is not None:
        labels = dataio.load_labels(spec.labels_path)
        labels = dataio.tile_labels(labels, original_len, spec.duplicate_n)

    if spec.algorithm == presets.REPAD:
        detector = RepadDetector(presets.detector_config_from(flat))
    else:
        detector = SaladDetector(presets.salad_config_from(flat))

    values = series.values.tolist()
    verdicts = [detector.step(ts, v) for ts, v in zip(series.timestamps, values)]

    if spec.algorithm == presets.REPAD:
        rows = verdicts
        point_verdicts = verdicts
        flagged = [v.index for v in verdicts if v.is_anomaly]
        trainings = detector.retrain_count
        extra_counts = {}
    else:
        rows = _flatten_salad(verdicts)
        point_verdicts = [sv.inner_verdict for sv in verdicts if sv.inner_verdict is not None]
        flagged = [v.index for v in point_verdicts if v.is_anomaly]
        trainings = detector.conversion_train_count + detector.inner.retrain_count
        conv_times = [sv.elapsed_conversion_seconds for sv in verdicts]
        conv_mean, conv_std = metrics._mean_std(conv_times)
        extra_counts = {
            "conversion_trainings": detector.conversion_train_count,
            "detection_trainings": detector.inner.retrain_count,
            "aare_emitted": len(point_verdicts),
            "conversion_time_mean": conv_mean,
            "conversion_time_std": conv_std,
        }

    k = spec.k if spec.k is not None else metrics.choose_k(series.interval_seconds)
    events = metrics.merge_events(flagged)
    tp, fp, fn = metrics.match(labels or LabelSet(), events, MatchPolicy(k))
    precision, recall, fscore = metrics.scores(tp, fp, fn)
    timing = metrics.timing_summary(point_verdicts)

    report = MetricsReport(
        tp=tp, fp=fp, fn=fn,
        precision=precision, recall=recall, fscore=fscore,
        training_ratio=metrics.training_ratio(trainings, len(series)),
        adt_nt_mean=timing.adt_nt_mean, adt_nt_std=timing.adt_nt_std,
        adt_nt_count=timing.adt_nt_count,
        adt_t_mean=timing.adt_t_mean, adt_t_std=timing.adt_t_std,
        adt_t_count=timing.adt_t_count,
    )

    report_doc = {
        "schema_version": dataio.SCHEMA_VERSION,
        "name": spec.name,
        "algorithm": spec.algorithm,
        "preset": spec.preset,
        "config": flat,
        "series": {
            "name": series.name,
            "points": len(series),
            "interval_seconds": series.interval_seconds,
            "irregular_interval": series.irregular,
            "duplicate_n": spec.duplicate_n,
        },
        "evaluation": {
            "k": k,
            "labels_provided": labels is not None,
            "flagged_points": len(flagged),
            "events": len(events),
            "trainings": trainings,
            **extra_counts,
        },
        "metrics": dataclasses.asdict(report),
    }

    files: list[str] = []
    if spec.out_dir is not None:
        files = [str(p) for p in dataio.write_outputs(rows, report_doc, spec.out_dir)]
    return RunResult(
        name=spec.name, report=report, report_doc=report_doc,
        verdict_rows=rows, files=files,
    )


_TABLE_COLUMNS = (
    ("name", 16, "<", ""),
    ("precision", 11, ">", ".3f"),
    ("recall", 9, ">", ".3f"),
    ("fscore", 9, ">", ".3f"),
    ("training_ratio", 16, ">", ".4f"),
    ("adt_nt", 10, ">", ".4f"),
    ("adt_t", 10, ">", ".4f"),
)


def format_comparison_table(rows: list[dict]) -> str:
    """Fixed-width comparison: one line per run, the metric columns."""
    header = "".join(f"{name:{align}{width}}" for name, width, align, _ in _TABLE_COLUMNS)
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append("".join(
            f"{row[name]:{align}{width}{spec}}"
            for name, width, align, spec in _TABLE_COLUMNS
        ))
    return "\n".join(lines)


def compare(spec_list: list[RunSpec], out_dir: Optional[str] = None) -> tuple[list[dict], str, list[str]]:
    """Run >= 2 specs sequentially on their shared input and tabulate.

    Sequential execution is deliberate: latency columns are only
    meaningful when runs do not contend for the CPU.
    """
    if len(spec_list) < 2:
        raise ConfigError("compare needs at least 2 run specs")
    rows = []
    files: list[str] = []
    for spec in spec_list:
        if out_dir is not None and spec.out_dir is None:
            spec = dataclasses.replace(spec, out_dir=str(Path(out_dir) / spec.name))
        result = run(spec)
        rows.append({
            "name": result.name,
            "precision": result.report.precision,
            "recall": result.report.recall,
            "fscore": result.report.fscore,
            "training_ratio": result.report.training_ratio,
            "adt_nt": result.report.adt_nt_mean,
            "adt_t": result.report.adt_t_mean,
            "tp": result.report.tp,
            "fp": result.report.fp,
            "fn": result.report.fn,
            "trainings": result.report_doc["evaluation"]["trainings"],
        })
        files.extend(result.files)

    table = format_comparison_table(rows)
    if out_dir is not None:
        doc = {"schema_version": dataio.SCHEMA_VERSION, "rows": rows}
        path = Path(out_dir) / "comparison.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        files.append(str(path))
    return rows, table, files
