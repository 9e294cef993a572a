"""Noise-robustness experiment harness.

Seeded repetitions of: draw (or split) a dataset, corrupt the training
portion, select the ridge weight by cross-validation on the corrupted
training set, fit each method, and score on the untouched test set. All
randomness flows from the single experiment seed through named sub-streams,
so any cell of a sweep is reproducible in isolation.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, NoiseSpec, parse_libsvm, synth_gaussians
from .loss import TemperaturePair
from .model import FitConfig, TTLRModel, fit, predict

__all__ = [
    "MethodSpec",
    "SyntheticSpec",
    "FileSource",
    "CrossValSpec",
    "ExperimentSpec",
    "ResultRow",
    "parse_method",
    "default_lambda_grid",
    "select_lambda",
    "run_experiment",
    "rows_to_csv",
    "rows_to_json",
    "summarize",
    "spec_from_config",
]

CSV_HEADER = "method,noise_kind,noise_level,rep,lambda,accuracy,seconds"

LAMBDA_RANGE = (1e-10, 1e2)

# sub-seed stream tags: SeedSequence(seed, spawn_key=(rep, stream, ...))
STREAM_TRAIN = 0
STREAM_TEST = 1
STREAM_NOISE = 2
STREAM_CV = 3
STREAM_INIT = 4


def default_lambda_grid(points: int = 13) -> tuple:
    """Log-spaced ridge weights spanning the full allowed range."""
    lo, hi = LAMBDA_RANGE
    return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), points))


@dataclass(frozen=True)
class MethodSpec:
    """A named temperature setting; the name is kept verbatim for output."""

    name: str
    temps: TemperaturePair


_METHOD_GRAMMAR = (
    "method must be 'plain_lr', 't_lr(t)' or 'ttlr(t1,t2)' with t in (0, 2)"
)

_FLOAT = r"([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)"
_T_LR_RE = re.compile(r"^t_lr\(\s*" + _FLOAT + r"\s*\)$")
_TTLR_RE = re.compile(r"^ttlr\(\s*" + _FLOAT + r"\s*,\s*" + _FLOAT + r"\s*\)$")


def parse_method(name: str) -> MethodSpec:
    text = name.strip()
    if text == "plain_lr":
        return MethodSpec(text, TemperaturePair(1.0, 1.0))
    m = _T_LR_RE.match(text)
    if m:
        return MethodSpec(text, TemperaturePair(1.0, float(m.group(1))))
    m = _TTLR_RE.match(text)
    if m:
        return MethodSpec(text, TemperaturePair(float(m.group(1)), float(m.group(2))))
    raise ValueError(f"cannot parse method {name!r}: {_METHOD_GRAMMAR}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Two balanced Gaussian classes at +/- mean with unit covariance."""

    train_per_class: int = 1000
    test_per_class: int = 1000
    mean: tuple = (2.0, 0.0)
    cov_scale: float = 1.0

    def __post_init__(self):
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise ValueError("per-class sizes must be >= 1")


@dataclass(frozen=True)
class FileSource:
    """A LIBSVM file re-split into train/test per repetition."""

    path: str
    split: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.split < 1.0):
            raise ValueError("split fraction must lie strictly in (0, 1)")


@dataclass(frozen=True)
class CrossValSpec:
    folds: int = 5
    lambda_grid: tuple = field(default_factory=default_lambda_grid)

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("cross-validation needs at least 2 folds")
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise ValueError("lambda grid is empty")
        lo, hi = LAMBDA_RANGE
        if min(grid) < lo or max(grid) > hi:
            raise ValueError(f"lambda grid must lie within [{lo}, {hi}]")
        object.__setattr__(self, "lambda_grid", grid)


@dataclass(frozen=True)
class ExperimentSpec:
    methods: tuple
    noise_kind: str = "outlier"
    noise_levels: tuple = (0.0,)
    noise_sigma: float = 10.0
    cv: CrossValSpec = field(default_factory=CrossValSpec)
    repetitions: int = 10
    seed: int = 0
    data: object = field(default_factory=SyntheticSpec)
    time_fits: bool = False

    def __post_init__(self):
        methods = tuple(
            m if isinstance(m, MethodSpec) else parse_method(m) for m in self.methods
        )
        if not methods:
            raise ValueError("need at least one method")
        object.__setattr__(self, "methods", methods)
        if self.noise_kind not in NoiseSpec.VALID_KINDS:
            raise ValueError(f"unknown noise kind {self.noise_kind!r}")
        levels = tuple(float(v) for v in self.noise_levels)
        if not levels:
            raise ValueError("need at least one noise level")
        for level in levels:
            if level > 0.0:
                # range checks live in NoiseSpec; fail before the run starts
                NoiseSpec(self.noise_kind, level, seed=0, sigma=self.noise_sigma)
        object.__setattr__(self, "noise_levels", levels)
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not isinstance(self.data, (SyntheticSpec, FileSource)):
            raise ValueError("data must be a SyntheticSpec or FileSource")


@dataclass(frozen=True)
class ResultRow:
    method: str
    noise_kind: str
    noise_level: float
    rep: int
    lam: float
    accuracy: float
    seconds: float

    def __post_init__(self):
        if not (0.0 <= self.accuracy <= 1.0):
            raise ValueError("accuracy must lie in [0, 1]")


def _sub_seed(seed: int, *key) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(1)[0])


def _accuracy(model: TTLRModel, data: Dataset) -> float:
    return float(np.mean(predict(model, data.X) == data.y))


def _rep_datasets(spec: ExperimentSpec, rep: int, full: Dataset | None):
    if isinstance(spec.data, SyntheticSpec):
        src = spec.data
        mean = np.asarray(src.mean, dtype=float)
        means = [mean, -mean]
        train = synth_gaussians(
            src.train_per_class, means, src.cov_scale,
            seed=_sub_seed(spec.seed, rep, STREAM_TRAIN),
        )
        test = synth_gaussians(
            src.test_per_class, means, src.cov_scale,
            seed=_sub_seed(spec.seed, rep, STREAM_TEST),
        )
        return train, test
    rng = np.random.default_rng(_sub_seed(spec.seed, rep, STREAM_TRAIN))
    perm = rng.permutation(full.n)
    cut = int(round(spec.data.split * full.n))
    if cut < 1 or cut >= full.n:
        raise ValueError("split leaves an empty train or test set")
    return full.subset(perm[:cut]), full.subset(perm[cut:])


def select_lambda(train: Dataset, temps, cv: CrossValSpec, cv_seed: int, init_seed: int) -> float:
    """Mean validation accuracy over k folds; ties resolve to the larger lambda."""
    rng = np.random.default_rng(cv_seed)
    folds = np.array_split(rng.permutation(train.n), cv.folds)
    config = FitConfig(seed=init_seed)
    mean_accs = []
    for lam in cv.lambda_grid:
        accs = []
        for k in range(cv.folds):
            val_idx = folds[k]
            train_idx = np.concatenate([folds[j] for j in range(cv.folds) if j != k])
            model = fit(train.subset(train_idx), temps, lam, config)
            accs.append(_accuracy(model, train.subset(val_idx)))
        mean_accs.append(float(np.mean(accs)))
    best = max(mean_accs)
    return max(lam for lam, acc in zip(cv.lambda_grid, mean_accs) if acc == best)


def run_experiment(spec: ExperimentSpec) -> list:
    """All sweep cells, emitted in (method, noise level, repetition) order.

    Per repetition the base train/test draw is shared by every level and
    method; per level the corrupted training set is shared by every method.
    Wall-clock seconds cover the final fit only and are written as 0.0 unless
    spec.time_fits is set, keeping default output byte-reproducible.
    """
    full = None
    if isinstance(spec.data, FileSource):
        with open(spec.data.path, "r", encoding="utf-8") as fh:
            full = parse_libsvm(fh)
    cells = {}
    for rep in range(spec.repetitions):
        train, test = _rep_datasets(spec, rep, full)
        for li, level in enumerate(spec.noise_levels):
            noise = NoiseSpec(
                kind=spec.noise_kind,
                level=level,
                seed=_sub_seed(spec.seed, rep, STREAM_NOISE, li),
                sigma=spec.noise_sigma,
            )
            noisy = noise.apply(train)
            cv_seed = _sub_seed(spec.seed, rep, STREAM_CV, li)
            for mi, method in enumerate(spec.methods):
                init_seed = _sub_seed(spec.seed, rep, STREAM_INIT, li, mi)
                lam = select_lambda(noisy, method.temps, spec.cv, cv_seed, init_seed)
                start = time.perf_counter()
                model = fit(noisy, method.temps, lam, FitConfig(seed=init_seed))
                seconds = time.perf_counter() - start if spec.time_fits else 0.0
                cells[(mi, li, rep)] = ResultRow(
                    method=method.name,
                    noise_kind=spec.noise_kind,
                    noise_level=level,
                    rep=rep,
                    lam=lam,
                    accuracy=_accuracy(model, test),
                    seconds=seconds,
                )
    return [cells[key] for key in sorted(cells)]


def _num(v: float) -> str:
    return repr(float(v))


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.method},{r.noise_kind},{_num(r.noise_level)},{r.rep},"
            f"{_num(r.lam)},{_num(r.accuracy)},{_num(r.seconds)}"
        )
    return "\n".join(lines) + "\n"


def rows_to_json(rows) -> str:
    payload = [
        {
            "method": r.method,
            "noise_kind": r.noise_kind,
            "noise_level": r.noise_level,
            "rep": r.rep,
            "lambda": r.lam,
            "accuracy": r.accuracy,
            "seconds": r.seconds,
        }
        for r in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def summarize(rows) -> str:
    """Mean and sample standard deviation of accuracy per sweep cell."""
    order = []
    groups = {}
    for r in rows:
        key = (r.method, r.noise_kind, r.noise_level)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r.accuracy)
    lines = [f"{'method':<18} {'noise_kind':<12} {'level':>6}  accuracy"]
    for key in order:
        accs = np.asarray(groups[key])
        std = accs.std(ddof=1) if accs.size > 1 else 0.0
        lines.append(
            f"{key[0]:<18} {key[1]:<12} {key[2]:>6g}  "
            f"{accs.mean():.4f} +/- {std:.4f}  (n={accs.size})"
        )
    return "\n".join(lines)


def spec_from_config(config: dict) -> ExperimentSpec:
    """Build an ExperimentSpec from a parsed JSON config dictionary.

    Schema (all keys optional except methods):
      methods: list of method strings
      noise: {kind, levels, sigma}
      cv: {folds, lambda_points} or {folds, lambda_grid}
      data: {train_per_class, test_per_class, mean, cov_scale}
            or {path, split}
      repetitions, seed, time_fits: scalars
    """
    if not isinstance(config, dict):
        raise ValueError("config root must be a JSON object")
    known = {"methods", "noise", "cv", "data", "repetitions", "seed", "time_fits"}
    unknown = set(config) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "methods" not in config:
        raise ValueError("config needs a 'methods' list")
    kwargs = {"methods": tuple(config["methods"])}
    noise = config.get("noise", {})
    if noise:
        noise_unknown = set(noise) - {"kind", "levels", "sigma"}
        if noise_unknown:
            raise ValueError(f"unknown noise keys: {sorted(noise_unknown)}")
        kwargs["noise_kind"] = noise.get("kind", "outlier")
        kwargs["noise_levels"] = tuple(noise.get("levels", (0.0,)))
        if "sigma" in noise:
            kwargs["noise_sigma"] = float(noise["sigma"])
    cv = config.get("cv", {})
    if cv:
        cv_unknown = set(cv) - {"folds", "lambda_grid", "lambda_points"}
        if cv_unknown:
            raise ValueError(f"unknown cv keys: {sorted(cv_unknown)}")
        grid = cv.get("lambda_grid")
        if grid is not None and "lambda_points" in cv:
            raise ValueError("give either lambda_grid or lambda_points, not both")
        if grid is None:
            grid = default_lambda_grid(int(cv.get("lambda_points", 13)))
        kwargs["cv"] = CrossValSpec(folds=int(cv.get("folds", 5)), lambda_grid=tuple(grid))
    data = config.get("data", {})
    if "path" in data:
        data_unknown = set(data) - {"path", "split"}
        if data_unknown:
            raise ValueError(f"unknown data keys: {sorted(data_unknown)}")
        kwargs["data"] = FileSource(path=data["path"], split=float(data.get("split", 0.5)))
    elif data:
        data_unknown = set(data) - {"train_per_class", "test_per_class", "mean", "cov_scale"}
        if data_unknown:
            raise ValueError(f"unknown data keys: {sorted(data_unknown)}")
        kwargs["data"] = SyntheticSpec(
            train_per_class=int(data.get("train_per_class", 1000)),
            test_per_class=int(data.get("test_per_class", 1000)),
            mean=tuple(data.get("mean", (2.0, 0.0))),
            cov_scale=float(data.get("cov_scale", 1.0)),
        )
    for key in ("repetitions", "seed"):
        if key in config:
            kwargs[key] = int(config[key])
    if "time_fits" in config:
        kwargs["time_fits"] = bool(config["time_fits"])
    return ExperimentSpec(**kwargs)
