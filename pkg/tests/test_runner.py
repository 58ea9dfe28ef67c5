import json

import pytest

from ladkit.errors import ConfigError
from ladkit.runner import RunSpec, compare, run


def spec_for(fixtures_dir, **kw):
    base = dict(
        algorithm="repad",
        input_path=str(fixtures_dir / "sine_spike_100.csv"),
        labels_path=str(fixtures_dir / "sine_spike_100.labels.json"),
        preset="table4",
    )
    base.update(kw)
    return RunSpec(**base)


def test_run_produces_full_report(fixtures_dir, tmp_path):
    result = run(spec_for(fixtures_dir, out_dir=str(tmp_path / "out")))
    doc = result.report_doc
    assert doc["schema_version"] == 1
    assert doc["algorithm"] == "repad"
    assert doc["config"]["look_back"] == 3
    assert doc["evaluation"]["k"] == 7
    assert doc["evaluation"]["labels_provided"] is True
    assert doc["metrics"]["recall"] == 1.0
    assert doc["series"]["points"] == 100
    assert len(result.verdict_rows) == 100
    assert len(result.files) == 3
    written = json.loads((tmp_path / "out" / "report.json").read_text())
    assert written["metrics"] == doc["metrics"]


def test_metric_fields_stable_across_runs(fixtures_dir):
    a = run(spec_for(fixtures_dir))
    b = run(spec_for(fixtures_dir))
    assert a.report_doc["metrics"]["tp"] == b.report_doc["metrics"]["tp"]
    assert a.report_doc["metrics"]["precision"] == b.report_doc["metrics"]["precision"]
    assert a.report_doc["metrics"]["training_ratio"] == b.report_doc["metrics"]["training_ratio"]
    # verdict-by-verdict equality apart from timing
    for va, vb in zip(a.verdict_rows, b.verdict_rows):
        assert (va.index, va.predicted, va.aare, va.is_anomaly) == (
            vb.index, vb.predicted, vb.aare, vb.is_anomaly
        )


def test_run_k_override(fixtures_dir):
    result = run(spec_for(fixtures_dir, k=0))
    assert result.report_doc["evaluation"]["k"] == 0


def test_run_duplicate_tiles_labels(fixtures_dir):
    result = run(spec_for(fixtures_dir, duplicate_n=2, overrides={"epochs": "5"}))
    assert result.report_doc["series"]["points"] == 200
    # 1 labeled point anomaly per copy
    assert result.report_doc["metrics"]["tp"] + result.report_doc["metrics"]["fn"] == 2


def test_run_salad_small(fixtures_dir):
    result = run(RunSpec(
        algorithm="salad",
        input_path=str(fixtures_dir / "sine_spike_100.csv"),
        overrides={
            "conversion_look_back": "8",
            "conversion_epochs": "10",
            "epochs": "10",
        },
    ))
    doc = result.report_doc
    assert doc["algorithm"] == "salad"
    assert "conversion_trainings" in doc["evaluation"]
    assert doc["evaluation"]["aare_emitted"] > 0
    # flattened rows expose conversion phase names
    phases = {row.phase for row in result.verdict_rows}
    assert "conversion_bootstrap" in phases and "active" in phases


def test_run_rejects_bad_algorithm(fixtures_dir):
    with pytest.raises(ConfigError):
        run(spec_for(fixtures_dir, algorithm="nope", preset=None))


def test_run_rejects_salad_without_look_back(fixtures_dir):
    with pytest.raises(ConfigError):
        run(RunSpec(algorithm="salad", input_path=str(fixtures_dir / "sine_spike_100.csv")))


def test_compare_runs_in_order_and_writes_json(fixtures_dir, tmp_path):
    variants = [
        spec_for(fixtures_dir, name="one", overrides={"epochs": "5"}),
        spec_for(fixtures_dir, name="two", overrides={"epochs": "10"}),
    ]
    rows, table, files = compare(variants, out_dir=str(tmp_path))
    assert [r["name"] for r in rows] == ["one", "two"]
    assert (tmp_path / "comparison.json").exists()
    saved = json.loads((tmp_path / "comparison.json").read_text())
    assert len(saved["rows"]) == 2
    assert table.splitlines()[2].startswith("one")


def test_compare_rejects_single_spec(fixtures_dir):
    with pytest.raises(ConfigError):
        compare([spec_for(fixtures_dir)])
