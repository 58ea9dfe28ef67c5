#!/usr/bin/env python3
"""Fetch the two NAB CPU-utilization series and derive index labels.

Downloads (network required):
  * realAWSCloudwatch/ec2_cpu_utilization_825cc2.csv   (CC2)
  * realAWSCloudwatch/rds_cpu_utilization_e47b3b.csv   (B3B)
  * labels/combined_windows.json

from the Numenta Anomaly Benchmark repository, then converts each
labeled anomaly window from timestamps to point indices in our local
label format. NAB publishes uniform-width windows, not a point/collective
classification, so every window is emitted as a collective range (the
evaluation's [start-K, end] acceptance rule subsumes the point rule).
Files land in ``data/nab/`` next to the repository root.

Usage:
  python scripts/fetch_nab.py            # fetch + derive labels
  python scripts/fetch_nab.py --offline  # derive labels from existing files
"""

import argparse
import csv
import json
import sys
import urllib.request
from pathlib import Path

BASE = "https://raw.githubusercontent.com/numenta/NAB/master"
SERIES = {
    "cc2": "realAWSCloudwatch/ec2_cpu_utilization_825cc2.csv",
    "b3b": "realAWSCloudwatch/rds_cpu_utilization_e47b3b.csv",
}
WINDOWS = "labels/combined_windows.json"
OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "nab"


def fetch(url, dest):
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        dest.write_bytes(response.read())


def load_timestamps(csv_path):
    with open(csv_path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        return [row[0].strip() for row in reader if row]


def derive_labels(csv_path, windows, nab_key, out_path):
    timestamps = load_timestamps(csv_path)
    collectives = []
    for start, end in windows[nab_key]:
        # NAB window bounds carry fractional seconds; match on the prefix
        start_i = next(i for i, ts in enumerate(timestamps) if ts >= start[: len(ts)])
        end_i = max(i for i, ts in enumerate(timestamps) if ts <= end[: len(ts)])
        collectives.append([start_i, end_i])
    doc = {
        "points": [],
        "collectives": collectives,
        "provenance": f"derived from NAB combined_windows.json key {nab_key}",
    }
    out_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out_path} ({len(collectives)} windows, {len(timestamps)} points)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--offline", action="store_true",
                        help="skip downloads; derive labels from already-fetched files")
    args = parser.parse_args()

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    windows_path = OUT_DIR / "combined_windows.json"
    if not args.offline:
        try:
            for name, rel in SERIES.items():
                fetch(f"{BASE}/{rel}", OUT_DIR / f"{name}.csv")
            fetch(f"{BASE}/{WINDOWS}", windows_path)
        except OSError as exc:
            print(f"download failed ({exc}); rerun with --offline if files exist", file=sys.stderr)
            return 1

    windows = json.loads(windows_path.read_text(encoding="utf-8"))
    for name, rel in SERIES.items():
        derive_labels(OUT_DIR / f"{name}.csv", windows, rel, OUT_DIR / f"{name}.labels.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
