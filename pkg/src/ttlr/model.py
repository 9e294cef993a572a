"""Classifier facade: fit via L-BFGS, predict, baseline constructors, serialization.

The model is purely linear (no automatic bias column); prediction is the
argmax over per-class activations with ties broken toward the lowest class
index. plain_lr and t_lr are temperature special cases of the same machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .loss import TemperaturePair, as_pair, regularized_objective
from .optimizer import OptimizationTrace, OptimizerConfig, lbfgs_minimize
from .partition import tempered_probs_rows

__all__ = [
    "TTLRModel",
    "FitConfig",
    "fit",
    "predict",
    "predict_proba",
    "make_baseline",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "ttlr-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class FitConfig:
    """Initialization seed and scale plus the optimizer settings.

    The default init draws W entrywise from Normal(0, 1e-10), i.e. stddev 1e-5.
    """

    seed: int = 0
    init_stddev: float = 1e-5
    optimizer: OptimizerConfig = OptimizerConfig()

    def __post_init__(self):
        if self.init_stddev < 0.0:
            raise ValueError("init_stddev must be >= 0")


@dataclass(frozen=True)
class TTLRModel:
    W: np.ndarray
    temps: TemperaturePair
    lam: float
    num_classes: int
    dim: int
    fitted: bool = False
    trace: OptimizationTrace | None = None

    def predict(self, x):
        return predict(self, x)

    def predict_proba(self, x):
        return predict_proba(self, x)


def fit(data, temps, lam: float, config: FitConfig | None = None) -> TTLRModel:
    """Minimize the regularized objective from a seeded near-zero init.

    Deterministic given (data, temps, lam, seed). A dataset whose features
    are identically zero short-circuits to the zero solution with a warning
    recorded in the trace (every W is then equivalent up to regularization).
    """
    temps = as_pair(temps)
    config = config or FitConfig()
    if data.n == 0:
        raise ValueError("dataset is empty")
    if data.num_classes < 2:
        raise ValueError("at least 2 classes are required")
    d, c = data.dim, data.num_classes

    if data.X.nnz == 0:
        trace = OptimizationTrace(termination="degenerate_data")
        trace.warnings.append(
            "all feature values are zero; returning the prior-only zero solution"
        )
        return TTLRModel(
            np.zeros((d, c)), temps, float(lam), c, d, fitted=True, trace=trace
        )

    rng = np.random.default_rng(config.seed)
    w0 = rng.normal(0.0, config.init_stddev, size=(d, c))

    def objective(flat):
        value, grad = regularized_objective(data, flat.reshape(d, c), temps, lam)
        return value, grad.ravel()

    flat, trace = lbfgs_minimize(objective, w0.ravel(), config.optimizer)
    return TTLRModel(
        flat.reshape(d, c), temps, float(lam), c, d, fitted=True, trace=trace
    )


def _activations(model: TTLRModel, x) -> np.ndarray:
    a = np.asarray(x @ model.W, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[1] != model.num_classes:
        raise ValueError("input dimension does not match the model")
    return a


def predict(model: TTLRModel, x):
    """argmax_c <x, w_c> as a 1-based label; lowest index wins ties.

    Accepts a single vector or a feature matrix (returns an array then).
    """
    if not model.fitted:
        raise ValueError("model is not fitted")
    a = _activations(model, x)
    labels = np.argmax(a, axis=1) + 1
    return int(labels[0]) if np.ndim(x) == 1 else labels


def predict_proba(model: TTLRModel, x):
    """Tempered class probabilities exp_t2(a_c - G) for the model activations."""
    if not model.fitted:
        raise ValueError("model is not fitted")
    a = _activations(model, x)
    p = tempered_probs_rows(a, model.temps.t2)
    return p[0] if np.ndim(x) == 1 else p


def make_baseline(kind: str, lam: float, config: FitConfig | None = None):
    """Fit-ready (temps, lam, config) for the reference methods.

    plain_lr is (1, 1); t_lr(t) is (1, t). Returns a callable running fit
    with those temperatures fixed.
    """
    kind = kind.strip()
    if kind == "plain_lr":
        temps = TemperaturePair(1.0, 1.0)
    elif kind.startswith("t_lr(") and kind.endswith(")"):
        temps = TemperaturePair(1.0, float(kind[5:-1]))
    else:
        raise ValueError(f"unknown baseline {kind!r}; expected plain_lr or t_lr(t)")

    def runner(data):
        return fit(data, temps, lam, config)

    runner.temps = temps
    return runner


def save_model(model: TTLRModel, path) -> None:
    """Versioned JSON with (dim, num_classes, t1, t2, lambda, row-major W).

    Floats are written in shortest round-trip form, so load restores W exactly.
    """
    if not model.fitted:
        raise ValueError("refusing to serialize an unfitted model")
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dim": model.dim,
        "num_classes": model.num_classes,
        "t1": model.temps.t1,
        "t2": model.temps.t2,
        "lambda": model.lam,
        "weights": [[float(v) for v in row] for row in model.W],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_model(path) -> TTLRModel:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a model file: {path}")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    W = np.array(payload["weights"], dtype=float)
    if W.shape != (payload["dim"], payload["num_classes"]):
        raise ValueError("weight shape disagrees with the recorded dimensions")
    return TTLRModel(
        W,
        TemperaturePair(payload["t1"], payload["t2"]),
        float(payload["lambda"]),
        int(payload["num_classes"]),
        int(payload["dim"]),
        fitted=True,
    )
