"""Noise-robustness sweep harness: seeding, CV, row layout, serialization."""

import json
import math

import numpy as np
import pytest

from ttlr.data import serialize_libsvm, synth_gaussians
from ttlr.experiment import (
    CSV_HEADER,
    CrossValSpec,
    ExperimentSpec,
    FileSource,
    SyntheticSpec,
    default_lambda_grid,
    parse_method,
    rows_to_csv,
    rows_to_json,
    run_experiment,
    select_lambda,
    spec_from_config,
    summarize,
)
from ttlr.loss import TemperaturePair

TINY_DATA = SyntheticSpec(train_per_class=60, test_per_class=60)
TINY_CV = CrossValSpec(folds=3, lambda_grid=(1e-6, 1e-3, 1e-1))


def tiny_spec(**overrides):
    base = dict(
        methods=("plain_lr", "ttlr(0.6,1.6)"),
        noise_kind="outlier",
        noise_levels=(0.0, 0.2),
        cv=TINY_CV,
        repetitions=2,
        seed=11,
        data=TINY_DATA,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_parse_method_grammar():
    m = parse_method("plain_lr")
    assert m.temps == TemperaturePair(1.0, 1.0)
    assert m.name == "plain_lr"
    m = parse_method("t_lr(1.6)")
    assert m.temps == TemperaturePair(1.0, 1.6)
    m = parse_method("ttlr(0.6,1.6)")
    assert m.temps == TemperaturePair(0.6, 1.6)
    m = parse_method("ttlr(0.6, 1.6)")
    assert m.temps == TemperaturePair(0.6, 1.6)
    for bad in ("lr", "ttlr", "ttlr(1)", "ttlr(0.6;1.6)", "t_lr(x)"):
        with pytest.raises(ValueError):
            parse_method(bad)
    # in-range grammar with out-of-range temperature
    with pytest.raises(ValueError):
        parse_method("ttlr(0.0,1.6)")


def test_default_lambda_grid_shape():
    grid = default_lambda_grid()
    assert len(grid) == 13
    assert grid[0] == pytest.approx(1e-10)
    assert grid[-1] == pytest.approx(1e2)
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_cross_val_spec_validation():
    CrossValSpec(folds=5, lambda_grid=(1e-10, 1.0, 1e2))
    with pytest.raises(ValueError):
        CrossValSpec(folds=1)
    with pytest.raises(ValueError):
        CrossValSpec(lambda_grid=(1e-12, 1.0))
    with pytest.raises(ValueError):
        CrossValSpec(lambda_grid=(1.0, 1e3))
    with pytest.raises(ValueError):
        CrossValSpec(lambda_grid=())


def test_experiment_spec_validation():
    with pytest.raises(ValueError):
        tiny_spec(noise_kind="gaussian_blur")
    with pytest.raises(ValueError):
        tiny_spec(repetitions=0)
    with pytest.raises(ValueError):
        tiny_spec(methods=())
    with pytest.raises(ValueError):
        tiny_spec(noise_levels=(0.0, 0.7))
    spec = tiny_spec()
    assert [m.name for m in spec.methods] == ["plain_lr", "ttlr(0.6,1.6)"]


def test_run_experiment_row_layout():
    rows = run_experiment(tiny_spec())
    # methods x levels x reps, ordered method-major then level then rep
    assert len(rows) == 2 * 2 * 2
    keys = [(r.method, r.noise_level, r.rep) for r in rows]
    assert keys == sorted(
        keys, key=lambda k: (["plain_lr", "ttlr(0.6,1.6)"].index(k[0]), k[1], k[2])
    )
    for r in rows:
        assert r.noise_kind == "outlier"
        assert 0.0 <= r.accuracy <= 1.0
        assert r.seconds == 0.0
        assert r.lam in TINY_CV.lambda_grid


def test_run_experiment_is_deterministic():
    rows1 = run_experiment(tiny_spec())
    rows2 = run_experiment(tiny_spec())
    assert rows_to_csv(rows1) == rows_to_csv(rows2)


def test_level_rows_do_not_depend_on_other_levels():
    # seeds are keyed by position, not drawn sequentially, so dropping a
    # level must not change the surviving rows
    both = run_experiment(tiny_spec(noise_levels=(0.0, 0.2)))
    clean_only = run_experiment(tiny_spec(noise_levels=(0.0,)))
    kept = [r for r in both if r.noise_level == 0.0]
    assert rows_to_csv(kept) == rows_to_csv(clean_only)


def test_method_rows_do_not_depend_on_other_methods():
    both = run_experiment(tiny_spec())
    solo = run_experiment(tiny_spec(methods=("plain_lr",)))
    kept = [r for r in both if r.method == "plain_lr"]
    assert rows_to_csv(kept) == rows_to_csv(solo)


def test_time_fits_flag_controls_seconds():
    rows = run_experiment(
        tiny_spec(repetitions=1, noise_levels=(0.0,), time_fits=True)
    )
    assert all(r.seconds > 0.0 for r in rows)


def test_select_lambda_breaks_ties_upward():
    # wide-margin blobs: every lambda in the grid separates perfectly, so the
    # tie resolves to the largest candidate
    train = synth_gaussians(30, [(8.0, 0.0), (-8.0, 0.0)], seed=3)
    cv = CrossValSpec(folds=3, lambda_grid=(1e-8, 1e-4, 1e-2))
    lam = select_lambda(train, TemperaturePair(1.0, 1.0), cv, cv_seed=5, init_seed=6)
    assert lam == 1e-2


def test_select_lambda_is_deterministic():
    train = synth_gaussians(40, [(2.0, 0.0), (-2.0, 0.0)], seed=9)
    cv = CrossValSpec(folds=4, lambda_grid=(1e-6, 1e-3, 1e-1))
    args = (train, TemperaturePair(0.6, 1.6), cv)
    assert select_lambda(*args, cv_seed=1, init_seed=2) == select_lambda(
        *args, cv_seed=1, init_seed=2
    )


def test_rows_to_csv_layout():
    rows = run_experiment(tiny_spec(repetitions=1))
    text = rows_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == len(rows) + 1
    first = lines[1].split(",")
    assert first[0] == "plain_lr"
    assert first[1] == "outlier"
    assert first[2] == "0.0"
    assert first[3] == "0"
    float(first[4])
    acc = float(first[5])
    assert 0.0 <= acc <= 1.0
    assert first[6] == "0.0"


def test_rows_to_json_round_trip():
    rows = run_experiment(tiny_spec(repetitions=1, noise_levels=(0.0,)))
    payload = json.loads(rows_to_json(rows))
    assert len(payload) == len(rows)
    assert payload[0]["method"] == rows[0].method
    assert payload[0]["accuracy"] == rows[0].accuracy
    assert payload[0]["lambda"] == rows[0].lam


def test_summarize_groups_cells():
    rows = run_experiment(tiny_spec())
    text = summarize(rows)
    assert "plain_lr" in text
    assert "ttlr(0.6,1.6)" in text
    # one summary line per (method, level) cell
    body = [ln for ln in text.strip().splitlines() if "+/-" in ln]
    assert len(body) == 4
    assert all("(n=2)" in ln for ln in body)


def test_file_source_split(tmp_path):
    data = synth_gaussians(50, [(2.0, 0.0), (-2.0, 0.0)], seed=21)
    path = tmp_path / "blobs.svm"
    path.write_text(serialize_libsvm(data))
    spec = tiny_spec(
        data=FileSource(str(path), split=0.5),
        repetitions=2,
        noise_levels=(0.0,),
        methods=("plain_lr",),
    )
    rows = run_experiment(spec)
    assert len(rows) == 2
    # different reps draw different splits, so accuracies may differ but both
    # runs of the same spec agree
    again = run_experiment(spec)
    assert rows_to_csv(rows) == rows_to_csv(again)


def test_file_source_validation():
    with pytest.raises(ValueError):
        FileSource("x.svm", split=0.0)
    with pytest.raises(ValueError):
        FileSource("x.svm", split=1.0)


def test_spec_from_config_full():
    cfg = {
        "methods": ["plain_lr", "ttlr(0.6,1.6)"],
        "noise": {"kind": "random_flip", "levels": [0.0, 0.1], "sigma": 10.0},
        "cv": {"folds": 3, "lambda_points": 5},
        "data": {"train_per_class": 80, "test_per_class": 90},
        "repetitions": 4,
        "seed": 77,
        "time_fits": True,
    }
    spec = spec_from_config(cfg)
    assert spec.noise_kind == "random_flip"
    assert spec.noise_levels == (0.0, 0.1)
    assert spec.cv.folds == 3
    assert len(spec.cv.lambda_grid) == 5
    assert isinstance(spec.data, SyntheticSpec)
    assert spec.data.train_per_class == 80
    assert spec.repetitions == 4
    assert spec.time_fits


def test_spec_from_config_file_data():
    cfg = {
        "methods": ["plain_lr"],
        "data": {"path": "some.svm", "split": 0.7},
    }
    spec = spec_from_config(cfg)
    assert isinstance(spec.data, FileSource)
    assert spec.data.split == 0.7


def test_spec_from_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        spec_from_config({"methods": ["plain_lr"], "verbose": True})
    with pytest.raises(ValueError):
        spec_from_config({"methods": ["plain_lr"], "noise": {"kind": "outlier", "speed": 1}})
    with pytest.raises(ValueError):
        spec_from_config({})
    with pytest.raises(ValueError):
        spec_from_config({"methods": ["plain_lr"], "cv": {"lambda_points": 3, "lambda_grid": [1.0]}})


@pytest.mark.xfail(
    strict=True,
    reason=(
        "zero-mean label-blind contamination of a balanced symmetric mixture "
        "adds a radial risk term that rescales but cannot rotate the "
        "population optimum, so a no-bias plain_lr keeps its accuracy and "
        "no tempered advantage can appear on this geometry"
    ),
)
def test_outlier_sweep_tempered_advantage():
    spec = ExperimentSpec(
        methods=("plain_lr", "ttlr(0.6,1.6)"),
        noise_kind="outlier",
        noise_levels=(0.0, 0.5),
        noise_sigma=10.0,
        cv=CrossValSpec(folds=3, lambda_grid=(1e-8, 1e-4, 1e-2)),
        repetitions=3,
        seed=11,
        data=SyntheticSpec(train_per_class=200, test_per_class=200, mean=(2.0, 0.0)),
    )
    rows = run_experiment(spec)

    def acc(method, level):
        vals = [r.accuracy for r in rows if r.method == method and r.noise_level == level]
        return float(np.mean(vals))

    gap = acc("ttlr(0.6,1.6)", 0.5) - acc("plain_lr", 0.5)
    assert gap >= 0.02, f"tempered advantage at ratio 0.5: {100 * gap:+.2f} pp"
