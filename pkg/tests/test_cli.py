import csv
import json

import pytest

from coopdetect.cli import main
from coopdetect.model import Dataset, ModelSpec


@pytest.fixture
def files(tmp_path):
    model, data = tmp_path / "m.json", tmp_path / "d.csv"
    assert main(["generate", "--d", "5", "--k-individual", "2", "--k-pairs", "3", "--seed", "4",
                 "--model-out", str(model), "--n", "20000", "--data-out", str(data)]) == 0
    return tmp_path, model, data


def test_generate(files):
    _, model, data = files
    m = ModelSpec.load(model)
    assert m.d == 5 and len(m.individual) == 2 and len(m.pairwise) == 3
    ds = Dataset.from_csv(data)
    assert ds.n == 20000 and ds.d == 5


def test_generate_prints_model(capsys):
    assert main(["generate", "--d", "4", "--k-individual", "1", "--k-pairs", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["d"] == 4


def test_exact_weights(files, capsys):
    _, model, _ = files
    assert main(["exact-weights", str(model)]) == 2
    assert main(["exact-weights", str(model), "--extended"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 15
    assert {r["i"] for r in rows} >= {"0"}


def test_exact_weights_cap(tmp_path):
    path = tmp_path / "big.json"
    ModelSpec(25, {(1, 2): 1.0}).save(path)
    assert main(["exact-weights", str(path)]) == 3


def test_detect(files):
    # k_individual + k_pairs = d makes the extended graph a spanning tree, so the tiny threshold never matters
    tmp, model, data = files
    out = tmp / "res.json"
    assert main(["detect", str(data), "--lambda", "1", "--mu", "2", "--extended", "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    m = ModelSpec.load(model)
    assert res["individual"] == sorted(m.individual)
    assert sorted(map(tuple, res["edges"])) == sorted(m.extended_graph().edges)


def test_detect_bad_params(files):
    _, _, data = files
    assert main(["detect", str(data), "--lambda", "3", "--mu", "2"]) == 2
    assert main(["detect", "missing.csv", "--lambda", "1", "--mu", "2"]) == 2


@pytest.mark.parametrize("method", ["mi", "mrmr", "l1"])
def test_baseline(files, capsys, method):
    _, _, data = files
    assert main(["baseline", str(data), "--method", method, "--k", "5"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [int(r["rank"]) for r in rows] == [1, 2, 3, 4, 5]


def test_experiment_and_fit_curve(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": 6, "k_individual": 2, "k_pairs": 2, "lambda": 1, "mu": 2,
                               "sample_sizes": [100, 200, 400], "n_models": 20, "n_test": 20}))
    results = tmp_path / "r.csv"
    assert main(["experiment", "--config", str(cfg), "--out", str(results)]) == 0
    rows = list(csv.DictReader(results.read_text().splitlines()))
    assert [r["n"] for r in rows] == ["100", "200", "400"]
    code = main(["fit-curve", str(results)])
    out = capsys.readouterr().out
    if code == 0:
        assert set(json.loads(out)) == {"method", "B", "c", "residual"}
    else:
        assert code == 2
    assert main(["fit-curve", str(results), "--method", "mi"]) == 2


def test_experiment_bad_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": 6, "methods": ["oracle"]}))
    assert main(["experiment", "--config", str(cfg)]) == 2
