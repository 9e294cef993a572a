"""Command-line harness: train, predict, sweep, verify, noise.

One concern per subcommand; every command is scriptable and seed-driven.
Data errors and invalid configurations exit with status 2 and a descriptive
message; verification failures exit with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .data import DataFormatError, NoiseSpec, parse_libsvm, serialize_libsvm
from .experiment import (
    rows_to_csv,
    rows_to_json,
    run_experiment,
    spec_from_config,
    summarize,
)
from .model import FitConfig, fit, load_model, predict, save_model
from .verify import SUITE_NAMES, format_report, run_verification


def _load_dataset(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_libsvm(fh)
    except OSError as exc:
        raise SystemExit(f"cannot read {path}: {exc.strerror}") from exc
    except DataFormatError as exc:
        raise SystemExit(f"{path}: {exc}") from exc


def _write_out(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_train(args) -> int:
    data = _load_dataset(args.data)
    model = fit(data, (args.t1, args.t2), args.lam, FitConfig(seed=args.seed))
    save_model(model, args.out)
    trace = model.trace
    print(
        f"fit {data.n} examples, dim {data.dim}, {data.num_classes} classes: "
        f"objective {trace.objective_values[-1]:.6f}, "
        f"{trace.iterations} iterations, {trace.termination}"
    )
    print(f"model written to {args.out}")
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    data = _load_dataset(args.data)
    if data.dim > model.dim:
        raise SystemExit(
            f"feature dimension mismatch: model has {model.dim}, data has {data.dim}"
        )
    X = data.X
    if data.dim < model.dim:
        # narrower file: absent trailing features read as zeros
        from scipy.sparse import csr_array, hstack

        pad = csr_array((data.n, model.dim - data.dim))
        X = csr_array(hstack([X, pad]))
    preds = predict(model, X)
    if data.num_classes == model.num_classes:
        labels = [data.label_table[p - 1] for p in preds]
        accuracy = float(np.mean(preds == data.y))
        print(f"accuracy {accuracy:.4f} on {data.n} examples", file=sys.stderr)
    else:
        # label spaces differ; emit internal 1-based class ids
        labels = list(preds)
    from .data import _format_number

    _write_out("\n".join(_format_number(v) for v in labels) + "\n", args.out)
    return 0


def _cmd_sweep(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise SystemExit(f"cannot read {args.config}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SystemExit(f"{args.config} is not valid JSON: {exc}") from exc
    if args.seed is not None:
        config["seed"] = args.seed
    if args.time:
        config["time_fits"] = True
    try:
        spec = spec_from_config(config)
    except (ValueError, TypeError) as exc:
        raise SystemExit(f"invalid experiment config: {exc}") from exc
    rows = run_experiment(spec)
    payload = rows_to_json(rows) if args.format == "json" else rows_to_csv(rows)
    if args.out is not None:
        _write_out(payload, args.out)
        print(f"{len(rows)} rows written to {args.out}")
    else:
        sys.stdout.write(payload)
    print(summarize(rows))
    return 0


def _cmd_verify(args) -> int:
    suites = SUITE_NAMES if args.suite == "all" else (args.suite,)
    all_passed = True
    for name in suites:
        report = run_verification(name)
        print(format_report(report))
        all_passed = all_passed and report.passed
    return 0 if all_passed else 1


def _cmd_noise(args) -> int:
    data = _load_dataset(args.data)
    try:
        spec = NoiseSpec(kind=args.kind, level=args.level, seed=args.seed, sigma=args.sigma)
        noisy = spec.apply(data)
    except ValueError as exc:
        raise SystemExit(str(exc)) from exc
    _write_out(serialize_libsvm(noisy), args.out)
    if args.out is not None:
        print(f"{noisy.n} examples written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttlr",
        description="Tempered-loss linear classification: training, "
        "noise-robustness sweeps, and numerical self-verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit a model on a LIBSVM file")
    p_train.add_argument("--data", required=True, help="LIBSVM training file")
    p_train.add_argument("--t1", type=float, default=1.0, help="loss temperature in (0,2)")
    p_train.add_argument("--t2", type=float, default=1.0, help="probability temperature in (0,2)")
    p_train.add_argument("--lambda", dest="lam", type=float, default=1e-4, help="ridge weight")
    p_train.add_argument("--seed", type=int, default=0, help="initialization seed")
    p_train.add_argument("--out", required=True, help="output model JSON path")
    p_train.set_defaults(func=_cmd_train)

    p_pred = sub.add_parser("predict", help="predict labels for a LIBSVM file")
    p_pred.add_argument("--model", required=True, help="model JSON from `train`")
    p_pred.add_argument("--data", required=True, help="LIBSVM file to score")
    p_pred.add_argument("--out", default=None, help="write predictions here (default stdout)")
    p_pred.set_defaults(func=_cmd_predict)

    p_sweep = sub.add_parser("sweep", help="run a noise-robustness experiment")
    p_sweep.add_argument("--config", required=True, help="experiment config JSON")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--out", default=None, help="write rows here (default stdout)")
    p_sweep.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sweep.add_argument(
        "--time", action="store_true",
        help="record wall-clock fit seconds (output is then not byte-reproducible)",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run numerical self-check suites")
    p_verify.add_argument(
        "--suite", choices=SUITE_NAMES + ("all",), default="all",
        help="which check battery to run",
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_noise = sub.add_parser("noise", help="corrupt a dataset and write it back out")
    p_noise.add_argument("--data", required=True, help="LIBSVM input file")
    p_noise.add_argument("--kind", choices=NoiseSpec.VALID_KINDS, required=True)
    p_noise.add_argument("--level", type=float, required=True, help="ratio or flip probability")
    p_noise.add_argument("--sigma", type=float, default=10.0, help="outlier noise scale")
    p_noise.add_argument("--seed", type=int, default=0)
    p_noise.add_argument("--out", default=None, help="output path (default stdout)")
    p_noise.set_defaults(func=_cmd_noise)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 2
        raise
    except (ValueError, OSError) as exc:
        # contract violations from the library surface as clean diagnostics
        print(exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
