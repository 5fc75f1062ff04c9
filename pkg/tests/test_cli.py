import csv
import json

import pytest

from sleepopt.cli import main

PLANTED = ",".join(["12"] + ["0"] * 4 + ["-9"] + ["0"] * 9)


def _run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory):
    """synth -> train -> explain chain shared by the read-only CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    assert _run("synth", "--n", 300, "--planted", PLANTED, "--noise", "0.02",
                "--bias", "1.0", "--seed", "9", "--out", root / "data") == 0
    assert _run("train", "--data", root / "data" / "synthetic.csv",
                "--seed", "4", "--out", root / "model") == 0
    assert _run("explain", "--model", root / "model" / "model.json",
                "--data", root / "data" / "synthetic.csv",
                "--split", "test", "--seed", "4", "--out", root / "explain") == 0
    return root


def test_synth_writes_dataset_and_manifest(pipeline_dir):
    data = pipeline_dir / "data"
    assert (data / "synthetic.csv").exists()
    manifest = json.loads((data / "manifest.json").read_text())
    assert manifest["command"] == "synth"
    assert manifest["seed"] == 9
    with open(data / "synthetic.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 301
    assert rows[0][-1] == "label"


def test_train_writes_model_and_metrics(pipeline_dir):
    model_dir = pipeline_dir / "model"
    doc = json.loads((model_dir / "model.json").read_text())
    assert doc["format_version"] == 1
    assert doc["feature_count"] == 15
    metrics = json.loads((model_dir / "metrics.json").read_text())
    assert 0.5 < metrics["test"]["f1"] <= 1.0


def test_explain_writes_weights_and_phi(pipeline_dir, schema):
    explain_dir = pipeline_dir / "explain"
    weights = json.loads((explain_dir / "weights.json").read_text())
    assert set(weights["features"]) == set(schema.field_names)
    assert weights["total_mass"] > 0
    with open(explain_dir / "phi.csv") as fh:
        header = fh.readline().strip()
    assert header == "sample_id,feature,phi"
    assert (explain_dir / "attribution.png").exists()


def test_recommend_emits_plans(pipeline_dir):
    out = pipeline_dir / "rec"
    code = _run("recommend", "--model-weights", pipeline_dir / "explain" / "weights.json",
                "--data", pipeline_dir / "data" / "synthetic.csv",
                "--lambda", "0.2", "--out", out)
    assert code == 0
    with open(out / "plans.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"record_id", "variable", "baseline", "delta", "optimized"}
    assert len(rows) == 300 * 7
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_plans"] == 300


def test_recommend_per_student_weights(pipeline_dir):
    out = pipeline_dir / "rec_ps"
    code = _run("recommend", "--model-weights", pipeline_dir / "explain" / "weights.json",
                "--data", pipeline_dir / "data" / "synthetic.csv",
                "--lambda", "0.2", "--per-student-weights",
                "--model", pipeline_dir / "model" / "model.json", "--out", out)
    assert code == 0
    assert (out / "plans.csv").exists()


def test_sweep_counts_non_increasing(pipeline_dir):
    out = pipeline_dir / "sweep"
    code = _run("sweep", "--model-weights", pipeline_dir / "explain" / "weights.json",
                "--data", pipeline_dir / "data" / "synthetic.csv",
                "--lambdas", "0.1,0.2,0.3", "--out", out)
    assert code == 0
    with open(out / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    counts = [float(r["avg_count"]) for r in rows]
    assert counts == sorted(counts, reverse=True)
    assert (out / "sweep.png").exists()


def test_pareto_concave(pipeline_dir):
    out = pipeline_dir / "pareto"
    code = _run("pareto", "--model-weights", pipeline_dir / "explain" / "weights.json",
                "--data", pipeline_dir / "data" / "synthetic.csv",
                "--kmax", "7", "--out", out)
    assert code == 0
    with open(out / "pareto.csv") as fh:
        rows = list(csv.DictReader(fh))
    benefits = [float(r["avg_benefit"]) for r in rows]
    assert len(benefits) == 8
    assert benefits == sorted(benefits)


def test_ablate_table(pipeline_dir):
    out = pipeline_dir / "ablate"
    code = _run("ablate", "--model-weights", pipeline_dir / "explain" / "weights.json",
                "--data", pipeline_dir / "data" / "synthetic.csv",
                "--lambda", "0.2", "--out", out)
    assert code == 0
    with open(out / "ablation.csv") as fh:
        rows = {r["variant"]: r for r in csv.DictReader(fh)}
    assert set(rows) == {"full", "no_penalty", "equal_weights"}
    eq = rows["equal_weights"]
    assert float(eq["avg_benefit"]) == float(eq["avg_interventions"])


def test_format_json_emits_mirrors(pipeline_dir):
    out = pipeline_dir / "sweep_json"
    code = _run("sweep", "--model-weights", pipeline_dir / "explain" / "weights.json",
                "--data", pipeline_dir / "data" / "synthetic.csv",
                "--lambdas", "0.1,0.2", "--format", "json", "--out", out)
    assert code == 0
    assert (out / "sweep.csv").exists()
    points = json.loads((out / "sweep.json").read_text())
    assert [p["lambda"] for p in points] == [0.1, 0.2]
    assert set(points[0]) == {"lambda", "avg_count", "avg_benefit"}


def test_preprocess_survey_csv(tmp_path):
    from tests.conftest import survey_row, write_survey_csv

    src = write_survey_csv(tmp_path / "survey.csv", [survey_row() for _ in range(6)])
    out = tmp_path / "prep"
    assert _run("preprocess", "--in", src, "--out", out) == 0
    with open(out / "encoded.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 7
    assert len(rows[1]) == 16  # 15 features + label


def test_usage_errors_exit_1(capsys):
    assert _run("recommend", "--bogus-flag") == 1
    assert _run("not-a-command") == 1


def test_missing_file_exits_2(tmp_path):
    assert _run("train", "--data", tmp_path / "nope.csv", "--out", tmp_path / "o") == 2


def test_validation_error_exits_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert _run("train", "--data", bad, "--out", tmp_path / "o") == 2


def test_chain_is_deterministic(tmp_path):
    """synth -> train -> explain -> recommend twice: byte-identical artifacts."""
    digests = []
    for run in ("r1", "r2"):
        base = tmp_path / run
        _run("synth", "--n", 120, "--planted", PLANTED, "--noise", "0.02",
             "--bias", "1.0", "--seed", "13", "--out", base / "data")
        _run("train", "--data", base / "data" / "synthetic.csv",
             "--seed", "5", "--out", base / "model")
        _run("explain", "--model", base / "model" / "model.json",
             "--data", base / "data" / "synthetic.csv", "--seed", "5",
             "--out", base / "explain")
        _run("recommend", "--model-weights", base / "explain" / "weights.json",
             "--data", base / "data" / "synthetic.csv", "--lambda", "0.2",
             "--out", base / "rec")
        digest = {}
        for sub in ("data", "model", "explain", "rec"):
            for p in sorted((base / sub).rglob("*")):
                if p.is_file():
                    digest[f"{sub}/{p.name}"] = p.read_bytes()
        digests.append(digest)
    assert digests[0].keys() == digests[1].keys()
    for name in digests[0]:
        assert digests[0][name] == digests[1][name], f"{name} differs between runs"
