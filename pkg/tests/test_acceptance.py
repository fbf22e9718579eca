"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The benchmark criteria (5, 6, 7) run the command-line benchmark on every
dataset prepared under ``data/`` with a reduced hyperparameter grid and 20
seeded splits.  Datasets that are not prepared count against the criteria.
"""

import itertools
import os
import time

import numpy as np
import pytest
from oracles import (
    max_relative_error,
    normwise_relative_error,
    numeric_gradient,
    random_model,
    scan_interpreter,
)

from ordrank import cli, evaluation, network, reference
from ordrank.data import NormStats, read_manifests
from ordrank.network import CLASS, RANK, RELATIVE_ENTROPY, SQUARE_ERROR

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")

ACCEPTANCE_GRID = (
    "--hidden-choices", "2,5,10",
    "--epoch-choices", "50,200,500",
    "--lr-choices", "0.05,0.1,0.25",
    "--patience-choices", "40",
    "--folds", "5",
)
BENCH_FLAGS = ("--trials", "20", "--ensemble", "5", "--seed", "0", "--no-plot") + ACCEPTANCE_GRID


def test_criterion_1_gradients(verdict):
    g = np.random.default_rng(2024)
    combos = list(itertools.product((RANK, CLASS), (SQUARE_ERROR, RELATIVE_ENTROPY), ("tanh", "sigmoid")))
    worst = entrywise = 0.0
    for i in range(100):
        mode, kind, activation = combos[i % len(combos)]
        d, H, K = int(g.integers(1, 7)), int(g.integers(1, 7)), int(g.integers(2, 7))
        model = random_model(g, d, H, K, mode, activation)
        x = g.normal(size=d)
        t = network.encode_target(int(g.integers(1, K + 1)), K, mode)
        h, o = network.forward(model, x)
        analytic = network.backward(model, x, h, o, t, kind).params()
        numeric = numeric_gradient(model, x, t, kind, step=1e-5)
        worst = max(worst, normwise_relative_error(analytic, numeric))
        entrywise = max(entrywise, max_relative_error(analytic, numeric))
    # entries far below the differencing noise (about 1e-10 absolute) make the
    # per-entry ratio meaningless, so the verdict uses the per-array norm ratio
    verdict(1, "gradient check on 100 random networks", worst <= 1e-5,
            f"max per-array relative error {worst:.2e}, limit 1e-5; max per-entry ratio {entrywise:.2e}")


def test_criterion_2_encode_decode(verdict):
    checked = failures = 0
    for K in range(2, 11):
        signs = np.array(list(itertools.product((-0.05, 0.05), repeat=K)))
        for k in range(1, K + 1):
            perturbed = network.encode_target(k, K) + signs
            decoded = network.decode(perturbed, RANK, 0.5)
            failures += int(np.count_nonzero(decoded != k))
            checked += len(signs)
    verdict(2, "decode(encode(k) +/- 0.05) == k for K in 2..10", failures == 0,
            f"{checked} perturbed targets, {failures} mismatches")


def test_criterion_3_scan_rule(verdict):
    g = np.random.default_rng(7)
    mismatches = 0
    n = 100_000
    Ks = g.integers(2, 11, size=n)
    for K in range(2, 11):
        rows = np.flatnonzero(Ks == K)
        O = g.uniform(size=(rows.size, K))
        # sprinkle exact threshold hits and sorted (monotone) vectors among the random ones
        O[g.uniform(size=O.shape) < 0.05] = 0.5
        mono = g.uniform(size=rows.size) < 0.2
        O[mono] = -np.sort(-O[mono], axis=1)
        T = 0.5
        fast = network.predict_category(O, T)
        slow = np.array([scan_interpreter(list(o), T) for o in O])
        mismatches += int(np.count_nonzero(fast != slow))
    verdict(3, "scan decoding versus literal interpreter", mismatches == 0,
            f"{n} random output vectors, {mismatches} mismatches")


def test_criterion_4_metric_bounds(verdict):
    g = np.random.default_rng(11)
    violations = 0
    for _ in range(10_000):
        K = int(g.integers(2, 11))
        n = int(g.integers(1, 60))
        pred, truth = g.integers(1, K + 1, size=n), g.integers(1, K + 1, size=n)
        zo = evaluation.zero_one_error(pred, truth)
        mae = evaluation.mean_abs_error(pred, truth)
        if not (zo <= mae + 1e-12 and mae <= (K - 1) * zo + 1e-12):
            violations += 1
    verdict(4, "zero-one <= MAE <= (K-1) zero-one", violations == 0, f"10000 random pairs, {violations} violations")


@pytest.fixture(scope="module")
def benchmark_runs(tmp_path_factory):
    """The acceptance benchmark, run once sequentially and once with two workers."""
    runs = {}
    for jobs in (1, 2):
        out = tmp_path_factory.mktemp(f"bench_jobs{jobs}")
        start = time.perf_counter()
        code = cli.main(["benchmark", "--manifest", DATA_DIR, "--jobs", str(jobs), *BENCH_FLAGS, "--out-dir", str(out)])
        runs[jobs] = (code, str(out), time.perf_counter() - start)
    return runs


def _available():
    return sorted(set(read_manifests(DATA_DIR)) & set(reference.DATASETS))


def _missing():
    return [d for d in reference.DATASETS if d not in _available()]


@pytest.mark.slow
def test_criterion_5_rank_versus_class(benchmark_runs, verdict):
    _, out, _ = benchmark_runs[1]
    s = evaluation.read_summary(os.path.join(out, "summary.txt"))
    avail = _available()
    mae_wins = sum(float(s[f"{d}.rank.mae_mean"]) <= float(s[f"{d}.class.mae_mean"]) for d in avail)
    zo_wins = sum(float(s[f"{d}.rank.zero_one_mean"]) < float(s[f"{d}.class.zero_one_mean"]) for d in avail)
    ok = mae_wins >= 6 and zo_wins >= 5
    detail = f"{len(avail)} of 8 datasets prepared; rank MAE <= class on {mae_wins}, rank zero-one lower on {zo_wins}"
    if _missing():
        detail += f"; not prepared: {', '.join(_missing())}"
    verdict(5, "NNRank vs NNClass on the eight benchmarks", ok, detail)


@pytest.mark.slow
def test_criterion_6_absolute_bands(benchmark_runs, verdict):
    _, out, _ = benchmark_runs[1]
    s = evaluation.read_summary(os.path.join(out, "summary.txt"))
    checks = [
        ("machine", "zero_one_mean", reference.NN_TABLE[RANK]["machine"][0], 0.06),
        ("stocks", "zero_one_mean", reference.NN_TABLE[RANK]["stocks"][0], 0.05),
        ("abalone", "mae_mean", reference.NN_TABLE[RANK]["abalone"][2], 0.05),
    ]
    parts = []
    ok = True
    for name, key, target, tol in checks:
        value = s.get(f"{name}.rank.{key}")
        if value is None:
            ok = False
            parts.append(f"{name}: not prepared")
            continue
        value = float(value)
        inside = abs(value - target) <= tol
        ok &= inside
        parts.append(f"{name} {key} {value:.4f} vs {target:.4f}+/-{tol} {'in' if inside else 'out of'} band")
    verdict(6, "absolute bands around the published NNRank results", ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_7_determinism(benchmark_runs, verdict):
    (c1, out1, t1), (c2, out2, t2) = benchmark_runs[1], benchmark_runs[2]
    with open(os.path.join(out1, "summary.txt"), "rb") as fh:
        a = fh.read()
    with open(os.path.join(out2, "summary.txt"), "rb") as fh:
        b = fh.read()
    ok = c1 == c2 == 0 and a == b
    verdict(7, "summary identical under --jobs 1 and --jobs 2", ok,
            f"exit codes {c1}/{c2}, {len(a)} bytes, runs took {t1:.0f}s and {t2:.0f}s")


def test_criterion_8_persistence(tmp_path, verdict):
    g = np.random.default_rng(99)
    mismatches = 0
    for i in range(20):
        d, H, K = int(g.integers(1, 9)), int(g.integers(1, 16)), int(g.integers(2, 11))
        mode = (RANK, CLASS)[i % 2]
        model = random_model(g, d, H, K, mode, network.ACTIVATIONS[i % 3], scale=2.0)
        if i % 4:
            model.norm = NormStats(g.normal(size=d) * 10, g.uniform(0.1, 10, size=d))
        path = tmp_path / f"m{i}.txt"
        network.save_model(model, str(path))
        back = network.load_model(str(path))
        X = g.normal(size=(1000, d)) * 5
        same_out = model.outputs(model.prepare(X)).tobytes() == back.outputs(back.prepare(X)).tobytes()
        same_pred = np.array_equal(model.predict_raw(X), back.predict_raw(X))
        mismatches += int(not (same_out and same_pred))
    verdict(8, "save/load/predict round trip", mismatches == 0, f"20 models x 1000 inputs, {mismatches} models differ")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-rA"]))
