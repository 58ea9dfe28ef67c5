#!/usr/bin/env python3
"""Regenerate the committed synthetic fixtures under tests/fixtures/.

All randomness comes from seeded PCG64 generators, so reruns are
byte-identical. Three series:

* sine_spike_100      -- 100-point clean sine (20 points/period) with one
                         spike of 10x the amplitude at index 60.
* sine_spikes_2000    -- 2000-point gentle sine (period 100, amplitude 2
                         around 50, noise sd 0.5) with 10x-amplitude
                         spikes at 500 (+), 1000 (-), 1500 (+). The noise
                         level is high enough that marginal threshold
                         crossings depend on the weight-init family,
                         which the backend-sensitivity check relies on.
* sine_flat_1000      -- 20 periods of a 50-point sine; period 12
                         (indices 600..649) flattened to the mean, the
                         stuck-sensor shape.

Timestamps are minute-interval ISO text, so the evaluation window slack
defaults to K=7.
"""

import json
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
T0 = datetime(2021, 1, 1, 0, 0, 0)


def timestamps(n):
    return [(T0 + timedelta(seconds=60 * i)).isoformat(sep=" ") for i in range(n)]


def write_series(name, values):
    path = FIXTURES / f"{name}.csv"
    lines = ["timestamp,value"]
    lines += [f"{ts},{repr(float(v))}" for ts, v in zip(timestamps(len(values)), values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(values)} points)")


def write_labels(name, points=(), collectives=()):
    path = FIXTURES / f"{name}.labels.json"
    doc = {"points": list(points), "collectives": [list(c) for c in collectives]}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def sine_spike_100():
    i = np.arange(100)
    vals = 10.0 + 2.0 * np.sin(2 * np.pi * i / 20)
    vals[60] += 20.0
    write_series("sine_spike_100", vals)
    write_labels("sine_spike_100", points=[60])


def sine_spikes_2000():
    rng = np.random.Generator(np.random.PCG64(20240601))
    i = np.arange(2000)
    vals = 50.0 + 2.0 * np.sin(2 * np.pi * i / 100) + rng.normal(0, 0.5, size=2000)
    vals[500] += 20.0
    vals[1000] -= 20.0
    vals[1500] += 20.0
    write_series("sine_spikes_2000", vals)
    write_labels("sine_spikes_2000", points=[500, 1000, 1500])


def sine_flat_1000():
    rng = np.random.Generator(np.random.PCG64(777))
    i = np.arange(1000)
    vals = 50.0 + 2.0 * np.sin(2 * np.pi * i / 50) + rng.normal(0, 0.1, size=1000)
    vals[600:650] = 50.0 + rng.normal(0, 0.1, size=50)
    write_series("sine_flat_1000", vals)
    write_labels("sine_flat_1000", collectives=[(600, 649)])


if __name__ == "__main__":
    FIXTURES.mkdir(parents=True, exist_ok=True)
    sine_spike_100()
    sine_spikes_2000()
    sine_flat_1000()
