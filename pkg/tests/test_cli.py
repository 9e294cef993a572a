"""Command-line interface, exercised in-process through main(argv)."""

import json
import subprocess
import sys

import numpy as np
import pytest

from ttlr.cli import main
from ttlr.data import parse_libsvm, serialize_libsvm, synth_gaussians
from ttlr.model import load_model


@pytest.fixture()
def train_file(tmp_path):
    data = synth_gaussians(60, [(2.0, 0.0), (-2.0, 0.0)], seed=14)
    path = tmp_path / "train.svm"
    path.write_text(serialize_libsvm(data))
    return path


def test_train_writes_model(tmp_path, train_file, capsys):
    out = tmp_path / "model.json"
    code = main(
        [
            "train",
            "--data",
            str(train_file),
            "--t1",
            "0.6",
            "--t2",
            "1.6",
            "--lambda",
            "0.001",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    model = load_model(out)
    assert model.temps.t1 == 0.6
    assert model.temps.t2 == 1.6
    assert model.lam == 0.001
    captured = capsys.readouterr()
    assert "objective" in captured.out
    assert "converged" in captured.out


def test_predict_round_trip(tmp_path, train_file, capsys):
    model_path = tmp_path / "m.json"
    assert main(["train", "--data", str(train_file), "--out", str(model_path)]) == 0
    capsys.readouterr()
    pred_path = tmp_path / "pred.txt"
    code = main(
        [
            "predict",
            "--model",
            str(model_path),
            "--data",
            str(train_file),
            "--out",
            str(pred_path),
        ]
    )
    assert code == 0
    captured = capsys.readouterr()
    assert "accuracy" in captured.err
    preds = [float(v) for v in pred_path.read_text().split()]
    data = parse_libsvm(train_file.read_text())
    assert len(preds) == data.n
    # predictions carry the original label values
    table = set(data.label_table)
    assert set(preds) <= table
    acc = np.mean(
        [p == data.label_table[y - 1] for p, y in zip(preds, data.y)]
    )
    assert acc > 0.9


def test_predict_to_stdout(tmp_path, train_file, capsys):
    model_path = tmp_path / "m.json"
    main(["train", "--data", str(train_file), "--out", str(model_path)])
    capsys.readouterr()
    code = main(["predict", "--model", str(model_path), "--data", str(train_file)])
    assert code == 0
    out_lines = capsys.readouterr().out.strip().splitlines()
    data = parse_libsvm(train_file.read_text())
    assert len(out_lines) == data.n


def test_noise_subcommand_flips_labels(tmp_path, train_file):
    out = tmp_path / "noisy.svm"
    code = main(
        [
            "noise",
            "--data",
            str(train_file),
            "--kind",
            "random_flip",
            "--level",
            "1.0",
            "--seed",
            "3",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    clean = parse_libsvm(train_file.read_text())
    noisy = parse_libsvm(out.read_text())
    assert np.array_equal(noisy.y, 3 - clean.y)
    assert np.array_equal(noisy.X.toarray(), clean.X.toarray())


def test_noise_outlier_keeps_count(tmp_path, train_file):
    out = tmp_path / "noisy.svm"
    code = main(
        [
            "noise",
            "--data",
            str(train_file),
            "--kind",
            "outlier",
            "--level",
            "0.25",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    clean = parse_libsvm(train_file.read_text())
    noisy = parse_libsvm(out.read_text(), dim=clean.dim)
    changed = np.any(noisy.X.toarray() != clean.X.toarray(), axis=1)
    assert changed.sum() == int(0.25 * clean.n)


def sweep_config(tmp_path, **extra):
    cfg = {
        "methods": ["plain_lr"],
        "noise": {"kind": "outlier", "levels": [0.0]},
        "cv": {"folds": 3, "lambda_grid": [1e-6, 1e-3]},
        "data": {"train_per_class": 40, "test_per_class": 40},
        "repetitions": 2,
        "seed": 5,
    }
    cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def test_sweep_csv_output(tmp_path, capsys):
    cfg = sweep_config(tmp_path)
    out = tmp_path / "rows.csv"
    code = main(["sweep", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "method,noise_kind,noise_level,rep,lambda,accuracy,seconds"
    assert len(lines) == 3
    # summary goes to stdout either way
    assert "plain_lr" in capsys.readouterr().out


def test_sweep_json_output_and_seed_override(tmp_path, capsys):
    cfg = sweep_config(tmp_path)
    code = main(["sweep", "--config", str(cfg), "--format", "json", "--seed", "9"])
    assert code == 0
    out = capsys.readouterr().out
    payload = json.loads(out[: out.rindex("]") + 1])
    assert len(payload) == 2
    assert payload[0]["method"] == "plain_lr"


def test_sweep_reruns_are_byte_identical(tmp_path, capsys):
    cfg = sweep_config(tmp_path)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_verify_subcommand_exit_codes(capsys):
    code = main(["verify", "--suite", "recovery"])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out
    assert "FAIL" not in out


def test_missing_file_is_reported(tmp_path, capsys):
    code = main(["train", "--data", str(tmp_path / "nope.svm"), "--out", str(tmp_path / "m.json")])
    assert code == 2
    assert "nope.svm" in capsys.readouterr().err


def test_malformed_data_is_reported(tmp_path, capsys):
    bad = tmp_path / "bad.svm"
    bad.write_text("1 1:1 1:2\n")
    code = main(["train", "--data", str(bad), "--out", str(tmp_path / "m.json")])
    assert code == 2
    err = capsys.readouterr().err
    assert "line 1" in err


def test_bad_config_is_reported(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"methods": ["warp_drive"]}))
    code = main(["sweep", "--config", str(cfg)])
    assert code == 2
    assert "warp_drive" in capsys.readouterr().err


def test_bad_temperature_is_reported(tmp_path, train_file, capsys):
    code = main(
        ["train", "--data", str(train_file), "--t1", "2.5", "--out", str(tmp_path / "m.json")]
    )
    assert code == 2
    assert "temperature" in capsys.readouterr().err.lower()


def test_module_entry_point(tmp_path):
    cp = subprocess.run(
        [sys.executable, "-m", "ttlr", "verify", "--suite", "recovery"],
        capture_output=True,
        text=True,
    )
    assert cp.returncode == 0
    assert "PASS" in cp.stdout
