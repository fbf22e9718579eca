"""Error metrics, model evaluation and the repeated-split benchmark."""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import reference, rng
from .data import DataError, SplitPlan, discretize_equal_interval, make_splits, normalize
from .network import CLASS, RANK, decode
from .training import GridSpec, TrainingConfig, grid_search, train_ensemble

log = logging.getLogger(__name__)


def _check_pair(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("empty prediction list")
    return pred, truth


def zero_one_error(pred, truth):
    """Fraction of wrong category assignments."""
    pred, truth = _check_pair(pred, truth)
    return float(np.count_nonzero(pred != truth)) / pred.size


def mean_abs_error(pred, truth):
    """Mean of |predicted - true| in category steps."""
    pred, truth = _check_pair(pred, truth)
    return float(np.abs(pred.astype(float) - truth.astype(float)).sum()) / pred.size


def rms_error(pred, truth):
    pred, truth = _check_pair(pred, truth)
    return math.sqrt(float(((pred.astype(float) - truth.astype(float)) ** 2).sum()) / pred.size)


def evaluate_model(model, test_data, T=None):
    """Zero-one and mean absolute error of a model or ensemble on normalized test data.

    ``T`` overrides the model's decoding threshold (rank mode only).
    """
    if test_data.n == 0:
        raise ValueError("empty test set")
    outputs = model.outputs(test_data.features)
    threshold = model.threshold if T is None else T
    pred = decode(outputs, model.mode, threshold)
    return zero_one_error(pred, test_data.labels), mean_abs_error(pred, test_data.labels)


def _sample_std(values):
    if len(values) < 2:
        return float("nan")
    return float(np.std(values, ddof=1))


@dataclass
class EvalReport:
    dataset: str
    method: str
    zero_one: list = field(default_factory=list)
    mae: list = field(default_factory=list)
    configs: list = field(default_factory=list)
    error: str = None

    @property
    def trials(self):
        return len(self.zero_one)

    @property
    def zero_one_mean(self):
        return float(np.mean(self.zero_one))

    @property
    def zero_one_std(self):
        return _sample_std(self.zero_one)

    @property
    def mae_mean(self):
        return float(np.mean(self.mae))

    @property
    def mae_std(self):
        return _sample_std(self.mae)


@dataclass(frozen=True)
class BenchmarkSettings:
    grid: GridSpec = GridSpec()
    base: TrainingConfig = TrainingConfig()
    seed: int = 0
    trials: int = 20
    ensemble: int = 5
    K: int = 5


def _run_trial(job):
    name, method, trial, data, train_idx, test_idx, settings = job
    tr_x, te_x, stats = normalize(data.features[train_idx], data.features[test_idx])
    train_data = data.subset(train_idx).with_features(tr_x)
    test_data = data.subset(test_idx).with_features(te_x)
    base = replace(settings.base, method=method)
    cfg = grid_search(train_data, settings.grid, rng.derive_seed(settings.seed, 1, trial), base)
    ens_seed = rng.derive_seed(settings.seed, 2, trial)
    ensemble = train_ensemble(train_data, cfg, settings.ensemble, ens_seed, norm=stats)
    zo, mae = evaluate_model(ensemble, test_data)
    return name, method, trial, zo, mae, replace(cfg, seed=ens_seed)


def _safe_trial(job):
    try:
        return _run_trial(job), None
    except Exception as exc:  # reported per dataset by the caller
        name, method, trial = job[:3]
        return (name, method, trial, None, None, None), f"trial {trial}: {type(exc).__name__}: {exc}"


def run_benchmark(manifest, settings, methods=(RANK, CLASS), jobs=1):
    """Repeated-split benchmark: discretize, split, tune, ensemble, evaluate.

    ``manifest`` maps dataset names to ``ManifestEntry`` objects.  Returns a
    dict keyed by ``(dataset, method)``.  A failure in any trial marks that
    dataset's reports with an error and the remaining datasets still run.
    """
    for m in methods:
        if m not in (RANK, CLASS):
            raise ValueError(f"unknown method {m!r}")
    reports = {}
    jobs_list = []
    for name in sorted(manifest):
        entry = manifest[name]
        try:
            data = discretize_equal_interval(entry.load(), entry.K)
            splits = make_splits(data.n, SplitPlan(entry.train_count, settings.seed, settings.trials))
        except (DataError, OSError) as exc:
            for m in methods:
                reports[(name, m)] = EvalReport(name, m, error=str(exc))
            continue
        for m in methods:
            reports[(name, m)] = EvalReport(name, m)
            for trial, (tr, te) in enumerate(splits):
                jobs_list.append((name, m, trial, data, tr, te, settings))

    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_safe_trial, jobs_list))
    else:
        results = [_safe_trial(j) for j in jobs_list]

    failed = set()
    for (name, method, trial, zo, mae, cfg), err in results:
        if err is not None:
            failed.add(name)
            rep = reports[(name, method)]
            rep.error = err if rep.error is None else rep.error
            log.error("%s/%s %s", name, method, err)
            continue
        rep = reports[(name, method)]
        rep.zero_one.append(zo)
        rep.mae.append(mae)
        rep.configs.append(cfg)
    for name in failed:
        for m in methods:
            rep = reports[(name, m)]
            if rep.error is None:
                rep.error = "aborted: another trial of this dataset failed"
    return reports


# -- report files ----------------------------------------------------------


def _g(x):
    return format(float(x), ".17g")


def summary_lines(reports, settings):
    """Machine-readable ``key=value`` lines; independent of job scheduling."""
    g = settings.grid
    b = settings.base
    lines = [
        f"seed={settings.seed}",
        f"trials={settings.trials}",
        f"ensemble={settings.ensemble}",
        f"K={settings.K}",
        f"grid.hidden={','.join(str(v) for v in g.hidden_choices)}",
        f"grid.epochs={','.join(str(v) for v in g.epoch_choices)}",
        f"grid.lr={','.join(_g(v) for v in g.lr_choices)}",
        f"grid.patience={','.join(str(v) for v in g.patience_choices)}",
        f"grid.folds={g.folds}",
        f"train.mode={b.mode}",
        f"train.loss={b.loss}",
        f"train.activation={b.activation}",
        f"train.init_scale={_g(b.init_scale)}",
        f"threshold={_g(b.threshold)}",
    ]
    for name, method in sorted(reports):
        rep = reports[(name, method)]
        p = f"{name}.{method}"
        if rep.error is not None:
            lines.append(f"{p}.error={rep.error}")
            continue
        lines += [
            f"{p}.trials={rep.trials}",
            f"{p}.zero_one_mean={_g(rep.zero_one_mean)}",
            f"{p}.zero_one_std={_g(rep.zero_one_std)}",
            f"{p}.mae_mean={_g(rep.mae_mean)}",
            f"{p}.mae_std={_g(rep.mae_std)}",
            f"{p}.zero_one={','.join(_g(v) for v in rep.zero_one)}",
            f"{p}.mae={','.join(_g(v) for v in rep.mae)}",
            f"{p}.hidden={','.join(str(c.hidden_units) for c in rep.configs)}",
            f"{p}.epochs={','.join(str(c.epochs) for c in rep.configs)}",
            f"{p}.lr={','.join(_g(c.initial_lr) for c in rep.configs)}",
            f"{p}.patience={','.join(str(c.patience) for c in rep.configs)}",
        ]
    return lines


def read_summary(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            if "=" in line:
                k, v = line.rstrip("\n").split("=", 1)
                values[k] = v
    return values


def _pm(mean, std, pct):
    if pct:
        return f"{100 * mean:.2f}±{100 * std:.2f}%"
    return f"{mean:.3f}±{std:.3f}"


def comparison_rows(reports):
    """Rows shaped like the NNRank/NNClass table: one per dataset."""
    names = sorted({n for n, _ in reports}, key=lambda n: (reference.DATASETS + (n,)).index(n))
    rows = []
    for name in names:
        row = [name]
        for metric, pct in (("zero_one", True), ("mae", False)):
            for method in (RANK, CLASS):
                rep = reports.get((name, method))
                if rep is None or rep.error is not None or rep.trials == 0:
                    row.append("n/a")
                else:
                    row.append(_pm(getattr(rep, f"{metric}_mean"), getattr(rep, f"{metric}_std"), pct))
        rows.append(row)
    return rows


def write_reports(reports, settings, out_dir, figures=True):
    """Write report.tsv, comparison.tsv, per_trial.tsv, summary.txt and (optionally) figures."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.tsv"), "w") as fh:
        fh.write(
            "dataset\tmethod\ttrials\tzero_one_mean\tzero_one_std\tmae_mean\tmae_std"
            "\tpublished_zero_one\tpublished_mae\tstatus\n"
        )
        for (name, method) in sorted(reports):
            rep = reports[(name, method)]
            published = reference.NN_TABLE.get(method, {}).get(name)
            pz = f"{published[0]:.4f}" if published else ""
            pm = f"{published[2]:.3f}" if published else ""
            if rep.error is not None:
                fh.write(f"{name}\t{method}\t{rep.trials}\t\t\t\t\t{pz}\t{pm}\terror: {rep.error}\n")
                continue
            fh.write(
                f"{name}\t{method}\t{rep.trials}\t{rep.zero_one_mean:.6f}\t{rep.zero_one_std:.6f}"
                f"\t{rep.mae_mean:.6f}\t{rep.mae_std:.6f}\t{pz}\t{pm}\tok\n"
            )
    with open(os.path.join(out_dir, "comparison.tsv"), "w") as fh:
        fh.write("dataset\tzero_one_rank\tzero_one_class\tmae_rank\tmae_class\n")
        for row in comparison_rows(reports):
            fh.write("\t".join(row) + "\n")
    with open(os.path.join(out_dir, "per_trial.tsv"), "w") as fh:
        fh.write("dataset\tmethod\ttrial\tzero_one\tmae\thidden\tepochs\tlr\tpatience\n")
        for (name, method) in sorted(reports):
            rep = reports[(name, method)]
            for i, (zo, mae, c) in enumerate(zip(rep.zero_one, rep.mae, rep.configs)):
                fh.write(
                    f"{name}\t{method}\t{i}\t{_g(zo)}\t{_g(mae)}\t{c.hidden_units}\t{c.epochs}"
                    f"\t{_g(c.initial_lr)}\t{c.patience}\n"
                )
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write("\n".join(summary_lines(reports, settings)) + "\n")
    if figures:
        from .plotting import plot_benchmark

        plot_benchmark(reports, os.path.join(out_dir, "benchmark.png"))
