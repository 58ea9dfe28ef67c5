"""Series/label ingestion and run-output emission.

Input series are two-column CSVs (``timestamp,value`` header, UTF-8,
LF or CRLF); timestamps are ISO-8601 text or epoch seconds and must be
strictly increasing. Labels are a local JSON format with index-based
positions: ``{"points": [int, ...], "collectives": [[start, end], ...]}``.
Outputs are ``verdicts.csv``, ``report.json`` and ``plot.csv`` with a
frozen column order; floats are written in shortest round-trip form.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ContractError, ParseError
from .metrics import LabelSet
from .repad import PointVerdict

Timestamp = Union[str, float, int]

VERDICT_COLUMNS = (
    "index", "timestamp", "value", "predicted", "aare", "threshold",
    "phase", "is_anomaly", "retrained", "elapsed_seconds",
)
PLOT_COLUMNS = ("index", "value", "predicted", "aare", "threshold")
SCHEMA_VERSION = 1


@dataclass
class TimeSeries:
    """Ordered (timestamp, value) pairs with a fixed sampling interval.

    ``irregular`` is a warning flag: the inferred interval varied by more
    than 1% somewhere in the series.
    """

    name: str
    interval_seconds: float
    timestamps: list
    values: np.ndarray
    irregular: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.timestamps) != len(self.values):
            raise ContractError("timestamps and values must have equal length")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def points(self) -> list[tuple[Timestamp, float]]:
        return list(zip(self.timestamps, self.values.tolist()))

    def epochs(self) -> np.ndarray:
        return np.array([to_epoch(t) for t in self.timestamps])


def to_epoch(ts: Timestamp) -> float:
    """Timestamp to epoch seconds; ISO text without a zone is read as UTC."""
    if isinstance(ts, (int, float)):
        return float(ts)
    text = str(ts).strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ParseError(f"unparseable timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _infer_interval(epochs: np.ndarray) -> tuple[float, bool]:
    gaps = np.diff(epochs)
    interval = float(statistics.median(gaps.tolist()))
    irregular = bool(np.any(np.abs(gaps - interval) > 0.01 * interval))
    return interval, irregular


def load_csv(path, name: Optional[str] = None) -> TimeSeries:
    """Parse a ``timestamp,value`` CSV into a series; the interval is the
    median gap. Non-monotonic timestamps or malformed rows are rejected."""
    path = Path(path)
    timestamps: list[Timestamp] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", path=path) from None
        if [h.strip().lower() for h in header] != ["timestamp", "value"]:
            raise ParseError(
                f"expected header 'timestamp,value', got {','.join(header)!r}",
                path=path, line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", path=path, line=lineno)
            ts_text = row[0].strip()
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(f"bad value {row[1]!r}", path=path, line=lineno) from None
            try:
                float(ts_text)
                ts: Timestamp = float(ts_text)
            except ValueError:
                to_epoch(ts_text)  # validates; reported with the line number
                ts = ts_text
            timestamps.append(ts)
            values.append(value)

    if len(values) < 2:
        raise ParseError("series needs at least 2 points", path=path)
    epochs = np.array([to_epoch(t) for t in timestamps])
    gaps = np.diff(epochs)
    if np.any(gaps <= 0):
        bad = int(np.argmax(gaps <= 0)) + 1
        raise ContractError(
            f"timestamps not strictly increasing at point {bad} of {path}"
        )
    interval, irregular = _infer_interval(epochs)
    return TimeSeries(
        name=name or path.stem,
        interval_seconds=interval,
        timestamps=timestamps,
        values=np.array(values),
        irregular=irregular,
    )


def write_csv(series: TimeSeries, path) -> Path:
    """Inverse of :func:`load_csv` (modulo the series name)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "value"])
        for ts, value in zip(series.timestamps, series.values):
            writer.writerow([_fmt_cell(ts), _fmt_cell(float(value))])
    return path


def _continue_timestamps(series: TimeSeries, extra: int) -> list[Timestamp]:
    """Timestamps for appended points, continuing the fixed interval
    past the end of the series in the ingested style."""
    last_epoch = to_epoch(series.timestamps[-1])
    numeric = isinstance(series.timestamps[-1], (int, float))
    sep = "T" if isinstance(series.timestamps[0], str) and "T" in series.timestamps[0] else " "
    out: list[Timestamp] = []
    for j in range(1, extra + 1):
        epoch = last_epoch + j * series.interval_seconds
        if numeric:
            out.append(epoch)
        else:
            dt = datetime.fromtimestamp(epoch, tz=timezone.utc).replace(tzinfo=None)
            out.append(dt.isoformat(sep=sep))
    return out


def duplicate(series: TimeSeries, n: int) -> TimeSeries:
    """Repeat the values n times, continuing timestamps at the fixed
    interval (repeating the originals would break monotonicity).
    Labels are tiled separately by :func:`tile_labels`."""
    if n < 1:
        raise ContractError("n must be >= 1")
    if n == 1:
        return TimeSeries(
            name=series.name,
            interval_seconds=series.interval_seconds,
            timestamps=list(series.timestamps),
            values=series.values.copy(),
            irregular=series.irregular,
        )
    values = np.tile(series.values, n)
    timestamps = list(series.timestamps)
    timestamps += _continue_timestamps(series, extra=(n - 1) * len(series))
    return TimeSeries(
        name=f"{series.name}-{n}",
        interval_seconds=series.interval_seconds,
        timestamps=timestamps,
        values=values,
        irregular=series.irregular,
    )


def tile_labels(labels: LabelSet, series_len: int, n: int) -> LabelSet:
    """Replicate every label at offsets k * series_len, k = 0..n-1."""
    if series_len < 1:
        raise ContractError("series_len must be positive")
    if n < 1:
        raise ContractError("n must be >= 1")
    for z in labels.point_anomalies:
        if not (0 <= z < series_len):
            raise ContractError(f"point label {z} outside series of length {series_len}")
    for a, b in labels.collective_anomalies:
        if not (0 <= a <= b < series_len):
            raise ContractError(f"collective label ({a}, {b}) outside series of length {series_len}")
    points = [z + k * series_len for k in range(n) for z in labels.point_anomalies]
    collectives = [
        (a + k * series_len, b + k * series_len)
        for k in range(n)
        for a, b in labels.collective_anomalies
    ]
    return LabelSet(point_anomalies=points, collective_anomalies=collectives)


def load_labels(path) -> LabelSet:
    """Parse the index-based label JSON; schema errors name the key."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", path=path) from None
    if not isinstance(doc, dict):
        raise ParseError("label document must be a JSON object", path=path)

    points = doc.get("points", [])
    if not isinstance(points, list) or not all(
        isinstance(p, int) and not isinstance(p, bool) and p >= 0 for p in points
    ):
        raise ParseError("must be a list of non-negative integers", path=path, key="points")

    collectives = doc.get("collectives", [])
    if not isinstance(collectives, list):
        raise ParseError("must be a list of [start, end] pairs", path=path, key="collectives")
    ranges: list[tuple[int, int]] = []
    for item in collectives:
        if (
            not isinstance(item, list) or len(item) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in item)
        ):
            raise ParseError("must be a list of [start, end] pairs", path=path, key="collectives")
        a, b = item
        if a > b:
            raise ParseError(f"range [{a}, {b}] has start > end", path=path, key="collectives")
        ranges.append((a, b))
    return LabelSet(point_anomalies=list(points), collective_anomalies=ranges)


def write_labels(labels: LabelSet, path) -> Path:
    path = Path(path)
    doc = {
        "points": list(labels.point_anomalies),
        "collectives": [[a, b] for a, b in labels.collective_anomalies],
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_outputs(verdicts: Sequence[PointVerdict], report: dict, out_dir) -> list[Path]:
    """Emit verdicts.csv, report.json and plot.csv into ``out_dir``.

    ``report`` is the full report document (metrics plus config echo);
    a ``schema_version`` field is added when missing.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ParseError(f"cannot create output directory: {exc}", path=out_dir) from None

    doc = dict(report)
    doc.setdefault("schema_version", SCHEMA_VERSION)

    verdict_path = out_dir / "verdicts.csv"
    with open(verdict_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VERDICT_COLUMNS)
        for v in verdicts:
            writer.writerow([
                v.index, _fmt_cell(v.timestamp), _fmt_cell(float(v.value)),
                _fmt_cell(v.predicted), _fmt_cell(v.aare), _fmt_cell(v.threshold),
                v.phase, _fmt_cell(v.is_anomaly), _fmt_cell(v.retrained),
                _fmt_cell(v.elapsed_seconds),
            ])

    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    plot_path = out_dir / "plot.csv"
    with open(plot_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLOT_COLUMNS)
        for v in verdicts:
            writer.writerow([
                v.index, _fmt_cell(float(v.value)), _fmt_cell(v.predicted),
                _fmt_cell(v.aare), _fmt_cell(v.threshold),
            ])

    return [verdict_path, report_path, plot_path]


def load_report(path) -> dict:
    """Read back a report.json document."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
