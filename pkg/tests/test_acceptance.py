"""Acceptance gate: one test per acceptance criterion, at stated tolerances.

Each test prints a single `CRITERION k: PASS/FAIL` line with the measured
quantity, so `pytest -v -s tests/test_acceptance.py` reads as a checklist.
Criterion 9 runs the full noise-robustness protocol and reports the actual
accuracy margins it measures.
"""

import math
import time

import numpy as np

from ttlr.analysis import bayes_binary_check, bayes_multiclass_check, curvature_report, find_inflection
from ttlr.data import inject_margin_flip, synth_gaussians
from ttlr.experiment import (
    CrossValSpec,
    ExperimentSpec,
    SyntheticSpec,
    rows_to_csv,
    run_experiment,
)
from ttlr.loss import TemperaturePair, batch_losses
from ttlr.partition import tempered_probs_rows
from ttlr.verify import gradient_suite, recovery_suite


def _report(num: int, passed: bool, detail: str) -> None:
    print(f"CRITERION {num}: {'PASS' if passed else 'FAIL'} - {detail}")


def test_criterion_01_normalization():
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    sizes = rng.integers(2, 11, size=1000)
    worst = 0.0
    for t2 in (0.5, 0.8, 1.0, 1.2, 1.6, 1.9):
        for c in range(2, 11):
            count = int(np.sum(sizes == c))
            if count == 0:
                continue
            A = rng.uniform(-20.0, 20.0, size=(count, c))
            P = tempered_probs_rows(A, t2)
            worst = max(worst, float(np.max(np.abs(P.sum(axis=1) - 1.0))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(1, ok, f"max |sum p - 1| = {worst:.3e} (tol 1e-10), {elapsed:.2f} s (< 5 s)")
    assert worst <= 1e-10, f"normalization residual {worst:.3e} exceeds 1e-10"
    assert elapsed < 5.0, f"runtime {elapsed:.2f} s exceeds 5 s"


def test_criterion_02_gradient_correctness():
    start = time.perf_counter()
    checks = gradient_suite(num_configs=200, seed=20240501)
    elapsed = time.perf_counter() - start
    worst = max(c.measured for c in checks)
    ok = all(c.passed for c in checks) and elapsed < 30.0
    _report(
        2,
        ok,
        f"max relative gradient error = {worst:.3e} over 200 configs "
        f"(tol 1e-5), {elapsed:.2f} s (< 30 s)",
    )
    for c in checks:
        assert c.tolerance == 1e-5
        assert c.passed, f"{c.name}: measured {c.measured:.3e} > {c.tolerance:.0e}"
    assert elapsed < 30.0, f"runtime {elapsed:.2f} s exceeds 30 s"


def test_criterion_03_special_case_recovery():
    start = time.perf_counter()
    checks = recovery_suite(seed=20240502)
    elapsed = time.perf_counter() - start
    softmax_chk = [c for c in checks if "softmax" in c.name][0]
    tlog_chk = [c for c in checks if "t2=1.6" in c.name][0]
    ok = all(c.passed for c in checks) and elapsed < 5.0
    _report(
        3,
        ok,
        f"softmax recovery deviation = {softmax_chk.measured:.3e} (tol 1e-12); "
        f"t-logistic identity deviation = {tlog_chk.measured:.3e} (exact); "
        f"{elapsed:.2f} s (< 5 s)",
    )
    assert softmax_chk.tolerance == 1e-12
    assert softmax_chk.passed
    assert tlog_chk.tolerance == 0.0
    assert tlog_chk.passed
    assert elapsed < 5.0, f"runtime {elapsed:.2f} s exceeds 5 s"


def test_criterion_04_loss_cap():
    # adversarial activations: enormous margins against the true class, for
    # clamping (t2 < 1), logistic (t2 = 1), and heavy-tail (t2 > 1) regimes.
    # W = I makes each input row the activation vector itself.
    t1 = 0.6
    cap = 1.0 / (1.0 - t1)
    rng = np.random.default_rng(20240604)
    worst = 0.0
    for t2 in (0.5, 0.8, 1.0, 1.2, 1.6, 1.9):
        tp = TemperaturePair(t1, t2)
        margins = np.concatenate(
            [
                -np.logspace(0.0, 6.0, 40),
                rng.uniform(-1e6, 0.0, size=40),
            ]
        )
        for c_count in (2, 5):
            A = np.zeros((margins.size, c_count))
            A[:, 0] = margins
            if c_count > 2:
                A[:, 2:] = rng.uniform(0.0, 20.0, size=(margins.size, c_count - 2))
            y = np.ones(margins.size, dtype=np.int64)
            vals = batch_losses(A, y, np.eye(c_count), tp)
            worst = max(worst, float(vals.max()))
    ok = worst <= cap + 1e-9
    _report(4, ok, f"max adversarial loss = {worst!r} vs cap {cap} + 1e-9")
    assert worst <= cap + 1e-9, f"loss {worst!r} exceeds the cap {cap}"
    # the sweep actually reaches the cap (clamped regime attains it exactly)
    assert worst >= cap - 1e-3


def test_criterion_05_regime_map_and_inflection():
    start = time.perf_counter()
    grid = (0.4, 0.7, 1.0, 1.3, 1.6)
    wrong = []
    for t1 in grid:
        for t2 in grid:
            rep = curvature_report(TemperaturePair(t1, t2), lo=-12.0, hi=12.0)
            expected = "convex" if (t1 >= t2 and t1 >= 1.0) else "quasi_convex"
            if rep.regime != expected:
                wrong.append((t1, t2, rep.regime))
    points = find_inflection(TemperaturePair(0.6, 1.6), -20.0, 5.0)
    elapsed = time.perf_counter() - start
    ok = not wrong and len(points) == 1 and elapsed < 60.0
    _report(
        5,
        ok,
        f"regime map misclassifications = {len(wrong)}/25; inflections for "
        f"(0.6,1.6) = {len(points)} at {points[0]:.6f} (residual <= 1e-6 "
        f"enforced in-solver); {elapsed:.2f} s (< 60 s)",
    )
    assert not wrong, f"misclassified temperature pairs: {wrong}"
    assert len(points) == 1, f"expected exactly one inflection, found {points}"
    assert elapsed < 60.0, f"runtime {elapsed:.2f} s exceeds 60 s"


def test_criterion_06_binary_bayes_oracle():
    etas = [round(0.05 * k, 2) for k in range(1, 20)]
    temp_pairs = ((1.0, 1.0), (1.0, 1.6), (0.6, 1.6), (1.3, 1.0))
    worst = 0.0
    sign_failures = 0
    for temps in temp_pairs:
        tp = TemperaturePair(*temps)
        for eta in etas:
            chk = bayes_binary_check(eta, tp)
            worst = max(worst, abs(chk.a_star_numeric - chk.a_star_closed_form))
            sign_failures += int(not chk.sign_consistent)
    ln3 = bayes_binary_check(0.75, TemperaturePair(1.0, 1.0))
    ln3_err = abs(ln3.a_star_numeric - math.log(3.0))
    ok = worst <= 1e-5 and sign_failures == 0 and ln3_err <= 1e-5
    _report(
        6,
        ok,
        f"max |numeric - closed form| = {worst:.3e} (tol 1e-5) over "
        f"{len(etas) * len(temp_pairs)} cases; sign failures = {sign_failures}; "
        f"|a*(0.75) - ln 3| = {ln3_err:.3e}",
    )
    assert worst <= 1e-5, f"closed-form deviation {worst:.3e} exceeds 1e-5"
    assert sign_failures == 0
    assert ln3_err <= 1e-5, f"ln 3 oracle off by {ln3_err:.3e}"


def test_criterion_07_multiclass_bayes_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(20240503)
    tp = TemperaturePair(0.6, 1.6)
    worst = 0.0
    argmax_failures = 0
    for k in range(100):
        c = int(rng.integers(3, 6))
        p = rng.dirichlet(np.ones(c))
        p = np.clip(p, 1e-3, None)
        p /= p.sum()
        chk = bayes_multiclass_check(p, tp)
        worst = max(worst, chk.max_deviation)
        argmax_failures += int(not chk.argmax_preserved)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and argmax_failures == 0 and elapsed < 120.0
    _report(
        7,
        ok,
        f"max deviation from the tilted posterior = {worst:.3e} (tol 1e-4) "
        f"over 100 posteriors; argmax failures = {argmax_failures}; "
        f"{elapsed:.2f} s (< 120 s)",
    )
    assert worst <= 1e-4, f"minimizer deviation {worst:.3e} exceeds 1e-4"
    assert argmax_failures == 0
    assert elapsed < 120.0, f"runtime {elapsed:.2f} s exceeds 120 s"


def test_criterion_08_margin_flip_fidelity():
    data = synth_gaussians(150, [(2.0, 0.0), (-2.0, 0.0)], seed=20240608)
    # exact counts across ratios
    for ratio in (0.05, 0.1, 0.3, 0.5):
        noisy = inject_margin_flip(data, ratio, seed=1)
        assert int(np.sum(noisy.y != data.y)) == math.floor(ratio * data.n), ratio
    # per-seed determinism
    a = inject_margin_flip(data, 0.1, seed=5)
    b = inject_margin_flip(data, 0.1, seed=5)
    assert np.array_equal(a.y, b.y)
    # decile comparison over 200 seeds; margins ranked by the oriented
    # class-mean direction (class 1 carries sign -1)
    w = np.array([-4.0, 0.0])
    u = data.signed_labels() * (data.X.toarray() @ w)
    order = np.argsort(u)
    n10 = data.n // 10
    bottom, top = order[:n10], order[-n10:]
    top_hits = 0
    bottom_hits = 0
    for seed in range(200):
        flipped = inject_margin_flip(data, 0.1, seed=seed).y != data.y
        top_hits += int(flipped[top].sum())
        bottom_hits += int(flipped[bottom].sum())
    ok = top_hits > bottom_hits
    _report(
        8,
        ok,
        f"counts exact, seeds deterministic; top-decile flips = {top_hits}, "
        f"bottom-decile flips = {bottom_hits} over 200 seeds",
    )
    assert top_hits > bottom_hits, (top_hits, bottom_hits)


def test_criterion_09_robustness_trend():
    start = time.perf_counter()
    spec = ExperimentSpec(
        methods=("plain_lr", "ttlr(0.6,1.6)"),
        noise_kind="outlier",
        noise_levels=(0.0, 0.3),
        noise_sigma=10.0,
        cv=CrossValSpec(),
        repetitions=10,
        seed=0,
        data=SyntheticSpec(train_per_class=1000, test_per_class=1000, mean=(2.0, 0.0)),
    )
    rows = run_experiment(spec)
    elapsed = time.perf_counter() - start

    def mean_acc(method, level):
        vals = [r.accuracy for r in rows if r.method == method and r.noise_level == level]
        assert len(vals) == 10
        return float(np.mean(vals))

    plain_clean = mean_acc("plain_lr", 0.0)
    plain_noisy = mean_acc("plain_lr", 0.3)
    ttlr_clean = mean_acc("ttlr(0.6,1.6)", 0.0)
    ttlr_noisy = mean_acc("ttlr(0.6,1.6)", 0.3)
    gap_pp = 100.0 * (ttlr_noisy - plain_noisy)
    self_deg_pp = 100.0 * (ttlr_clean - ttlr_noisy)
    ok = gap_pp >= 5.0 and self_deg_pp <= 3.0 and elapsed < 600.0
    _report(
        9,
        ok,
        f"accuracies: plain_lr {plain_clean:.4f} -> {plain_noisy:.4f}, "
        f"ttlr {ttlr_clean:.4f} -> {ttlr_noisy:.4f}; "
        f"gap at ratio 0.3 = {gap_pp:+.2f} pp (need >= +5); "
        f"ttlr self-degradation = {self_deg_pp:+.2f} pp (need <= 3); "
        f"{elapsed:.1f} s (< 600 s)",
    )
    assert elapsed < 600.0, f"runtime {elapsed:.1f} s exceeds 600 s"
    assert self_deg_pp <= 3.0, (
        f"ttlr degraded by {self_deg_pp:+.2f} pp at ratio 0.3 (limit 3)"
    )
    assert gap_pp >= 5.0, (
        f"measured gap {gap_pp:+.2f} pp < required +5 pp. Both methods hold "
        f"the clean accuracy under this contamination: plain_lr "
        f"{plain_noisy:.4f}, ttlr {ttlr_noisy:.4f}. Zero-mean label-blind "
        f"noise applied uniformly over a class-symmetric mixture adds a "
        f"radial risk term that rescales but cannot rotate the population "
        f"optimum, so a no-bias linear separator keeps its direction and "
        f"plain logistic regression does not lose accuracy here."
    )


def test_criterion_10_csv_determinism():
    spec = ExperimentSpec(
        methods=("ttlr(0.6,1.6)",),
        noise_kind="outlier",
        noise_levels=(0.2,),
        cv=CrossValSpec(folds=3, lambda_grid=(1e-6, 1e-3, 1e-1)),
        repetitions=2,
        seed=20240610,
        data=SyntheticSpec(train_per_class=80, test_per_class=80),
    )
    first = rows_to_csv(run_experiment(spec)).encode()
    second = rows_to_csv(run_experiment(spec)).encode()
    ok = first == second
    _report(10, ok, f"rerun CSV bytes identical = {ok} ({len(first)} bytes)")
    assert first == second
