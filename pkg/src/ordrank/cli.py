"""Command-line interface: ``ordrank <command> [options]``.

Every command writes into a run directory (``--out-dir``, or
``$ORDRANK_RUNS/<run-name>``, default root ``runs/``) and records its
resolved options there as ``config.txt``.

Exit codes: 0 success, 1 some requested output missing (benchmark), 2 usage
error, 3 data error, 4 numerical abort.
"""

import argparse
import logging
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__, data, network, training
from .data import DataError
from .evaluation import BenchmarkSettings, evaluate_model, run_benchmark, write_reports
from .training import Ensemble, GridSpec, NumericalError, TrainingConfig

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

log = logging.getLogger("ordrank")


class UsageError(Exception):
    pass


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def run_dir(args):
    if args.out_dir:
        path = args.out_dir
    else:
        root = os.environ.get("ORDRANK_RUNS", "runs")
        name = args.run_name or time.strftime(f"%Y%m%d-%H%M%S-{args.command}")
        path = os.path.join(root, name)
        base, i = path, 1
        while not args.run_name and os.path.exists(path):
            path = f"{base}-{i}"
            i += 1
    os.makedirs(path, exist_ok=True)
    return path


def record_config(args, out):
    skip = {"func"}
    with open(os.path.join(out, "config.txt"), "w") as fh:
        fh.write(f"ordrank_version={__version__}\n")
        for key in sorted(vars(args)):
            if key in skip:
                continue
            value = getattr(args, key)
            if isinstance(value, (tuple, list)):
                value = ",".join(str(v) for v in value)
            fh.write(f"{key}={value}\n")


def _load_ordinal(args):
    """Labeled data from --data: discretized with --k unless --labels is set."""
    if args.labels:
        return data.load_ordinal_csv(args.data, args.target_col, args.k)
    return data.discretize_equal_interval(data.load_csv(args.data, args.target_col), args.k)


def _train_config(args, method=None):
    return TrainingConfig(
        hidden_units=args.hidden,
        epochs=args.epochs,
        initial_lr=args.lr,
        patience=args.patience,
        mode=args.update,
        loss=args.loss,
        seed=args.seed,
        init_scale=args.init_scale,
        method=method or args.mode,
        activation=args.activation,
        threshold=args.threshold,
    )


def _base_config(args):
    return TrainingConfig(
        mode=args.update,
        loss=args.loss,
        seed=args.seed,
        init_scale=args.init_scale,
        method=getattr(args, "mode", network.RANK),
        activation=args.activation,
        threshold=args.threshold,
    )


def _grid(args):
    return GridSpec(
        hidden_choices=args.hidden_choices,
        epoch_choices=args.epoch_choices,
        lr_choices=args.lr_choices,
        patience_choices=args.patience_choices,
        folds=args.folds,
    )


# -- commands --------------------------------------------------------------


def cmd_discretize(args):
    out = run_dir(args)
    record_config(args, out)
    ds = data.discretize_equal_interval(data.load_csv(args.data, args.target_col), args.k)
    data.write_table(os.path.join(out, "ordinal.csv"), ds.features, ds.labels)
    with open(os.path.join(out, "edges.txt"), "w") as fh:
        fh.write(" ".join(format(e, ".17g") for e in ds.edges) + "\n")
    counts = np.bincount(ds.labels, minlength=ds.K + 1)[1:]
    print(f"{ds.n} rows, K={ds.K}, counts per category: {' '.join(map(str, counts))}")
    print(f"wrote {out}/ordinal.csv")
    return EXIT_OK


def cmd_split(args):
    out = run_dir(args)
    record_config(args, out)
    n = args.n if args.n is not None else data.read_table(args.data).shape[0]
    splits = data.make_splits(n, data.SplitPlan(args.train_count, args.seed, args.trials))
    with open(os.path.join(out, "splits.txt"), "w") as fh:
        for i, (tr, te) in enumerate(splits):
            fh.write(f"{i}\ttrain\t{','.join(map(str, tr))}\n")
            fh.write(f"{i}\ttest\t{','.join(map(str, te))}\n")
    print(f"wrote {len(splits)} splits to {out}/splits.txt")
    return EXIT_OK


def cmd_train(args):
    ds = _load_ordinal(args)
    config = _train_config(args)
    for msg in config.out_of_range():
        log.warning("outside the benchmark grid: %s", msg)
    out = run_dir(args)
    record_config(args, out)
    X, _, stats = data.normalize(ds.features, ds.features[:0])
    train_data = ds.with_features(X)
    if ds.edges is not None:
        with open(os.path.join(out, "edges.txt"), "w") as fh:
            fh.write(" ".join(format(e, ".17g") for e in ds.edges) + "\n")
    models = []
    for j in range(args.ensemble):
        cfg = replace(config, seed=config.seed + j)
        model, tlog = training.train(train_data, cfg, norm=stats)
        models.append(model)
        suffix = "" if args.ensemble == 1 else f"-{j}"
        tlog.write(os.path.join(out, f"train{suffix}.log"))
        if args.plot:
            from .plotting import plot_training_log

            plot_training_log(tlog, os.path.join(out, f"training{suffix}.png"))
    network.save_model(models, os.path.join(out, "model.txt"))
    predictor = Ensemble(models)
    zo, mae = evaluate_model(predictor, train_data)
    print(f"training zero-one error {zo:.4f}, mean absolute error {mae:.4f}")
    print(f"wrote {out}/model.txt")
    return EXIT_OK


def _predictor(path):
    try:
        models = network.load_models(path)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    return models[0] if len(models) == 1 else Ensemble(models)


def cmd_predict(args):
    predictor = _predictor(args.model)
    if args.target_col is None:
        X = data.load_features(args.data)
    else:
        X = data.load_csv(args.data, args.target_col).features
    if X.shape[1] != predictor.d:
        raise DataError(f"{args.data}: model expects d={predictor.d} features, found {X.shape[1]}")
    out = run_dir(args)
    record_config(args, out)
    Xn = predictor.prepare(X)
    outputs = predictor.outputs(Xn)
    cats = network.decode(outputs, predictor.mode, predictor.threshold if args.threshold is None else args.threshold)
    lines = []
    for c, o in zip(cats, outputs):
        if args.emit_probs:
            probs = ",".join(format(v, ".9g") for v in o)
            lines.append(f"{c},{probs},{network.cumulative_score(o):.9g}")
        else:
            lines.append(str(c))
    text = "\n".join(lines) + "\n"
    target = args.out or os.path.join(out, "predictions.txt")
    with open(target, "w") as fh:
        fh.write(text)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_evaluate(args):
    predictor = _predictor(args.model)
    ds = data.load_ordinal_csv(args.data, args.target_col, predictor.K)
    if ds.d != predictor.d:
        raise DataError(f"{args.data}: model expects d={predictor.d} features, found {ds.d}")
    out = run_dir(args)
    record_config(args, out)
    test = ds.with_features(predictor.prepare(ds.features))
    zo, mae = evaluate_model(predictor, test, args.threshold)
    with open(os.path.join(out, "evaluation.txt"), "w") as fh:
        fh.write(f"n={ds.n}\nzero_one={zo:.17g}\nmae={mae:.17g}\n")
    print(f"zero-one error {zo:.4f}\tmean absolute error {mae:.4f}\t(n={ds.n})")
    return EXIT_OK


def cmd_gridsearch(args):
    ds = _load_ordinal(args)
    out = run_dir(args)
    record_config(args, out)
    X, _, _ = data.normalize(ds.features, ds.features[:0])
    scores = training.score_grid(ds.with_features(X), _grid(args), args.seed, _base_config(args))
    training.write_grid_table(scores, os.path.join(out, "grid.tsv"))
    best = scores[0].config
    with open(os.path.join(out, "best_config.txt"), "w") as fh:
        for k, v in best.as_dict().items():
            fh.write(f"{k}={v}\n")
    print(
        f"best: hidden={best.hidden_units} epochs={best.epochs} lr={best.initial_lr:g} "
        f"patience={best.patience} cv_mae={scores[0].score:.4f}"
    )
    return EXIT_OK


def cmd_benchmark(args):
    manifest = data.read_manifests(args.manifest)
    if args.datasets:
        missing = [d for d in args.datasets if d not in manifest]
        if missing:
            raise UsageError(f"datasets not in manifest: {', '.join(missing)}")
        manifest = {d: manifest[d] for d in args.datasets}
    for m in args.modes:
        if m not in network.MODES:
            raise UsageError(f"unknown mode {m!r}")
    out = run_dir(args)
    record_config(args, out)
    settings = BenchmarkSettings(
        grid=_grid(args),
        base=_base_config(args),
        seed=args.seed,
        trials=args.trials,
        ensemble=args.ensemble,
        K=5,
    )
    for entry in manifest.values():
        if entry.K != settings.K:
            log.warning("%s: manifest K=%d differs from the standard 5 categories", entry.name, entry.K)
    reports = run_benchmark(manifest, settings, methods=args.modes, jobs=args.jobs)
    write_reports(reports, settings, out, figures=not args.no_plot)
    failed = sorted({n for (n, _), r in reports.items() if r.error is not None})
    for name, method in sorted(reports):
        rep = reports[(name, method)]
        if rep.error is None:
            print(
                f"{name:12s} {method:5s} zero-one {100 * rep.zero_one_mean:6.2f}±{100 * rep.zero_one_std:.2f}%"
                f"  mae {rep.mae_mean:.3f}±{rep.mae_std:.3f}"
            )
        else:
            print(f"{name:12s} {method:5s} FAILED: {rep.error}")
    print(f"wrote {out}/summary.txt")
    return EXIT_PARTIAL if failed else EXIT_OK


# -- parser ----------------------------------------------------------------


def _add_output(p):
    p.add_argument("--out-dir", help="run directory (default: $ORDRANK_RUNS/<run-name>)")
    p.add_argument("--run-name", help="name of the run directory under the runs root")


def _add_data(p, required=True):
    p.add_argument("--data", required=required, help="comma- or whitespace-delimited numeric file")
    p.add_argument("--target-col", type=int, default=-1, help="0-based target column (default: last)")
    p.add_argument("--k", type=int, default=5, help="number of ordinal categories (default 5)")
    p.add_argument("--labels", action="store_true", help="target column already holds categories 1..K")


def _add_training(p):
    p.add_argument("--update", choices=(training.ONLINE, training.BATCH), default=training.ONLINE)
    p.add_argument("--loss", choices=network.LOSSES, default=network.SQUARE_ERROR)
    p.add_argument("--activation", choices=network.ACTIVATIONS, default="tanh")
    p.add_argument("--init-scale", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)


def _add_grid(p):
    p.add_argument("--hidden-choices", type=_ints, default=training.BENCH_HIDDEN)
    p.add_argument("--epoch-choices", type=_ints, default=training.BENCH_EPOCHS)
    p.add_argument("--lr-choices", type=_floats, default=training.BENCH_LR)
    p.add_argument("--patience-choices", type=_ints, default=training.BENCH_PATIENCE)
    p.add_argument("--folds", type=int, default=5)


def build_parser():
    parser = argparse.ArgumentParser(prog="ordrank", description="Neural-network ordinal regression (NNRank / NNClass).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discretize", help="bin a metric target into K equal-width categories")
    _add_data(p)
    _add_output(p)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("split", help="write seeded train/test index splits")
    p.add_argument("--data", help="data file (row count is taken from it)")
    p.add_argument("--n", type=int, help="row count, instead of --data")
    p.add_argument("--train-count", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a model (or an ensemble with --ensemble m)")
    _add_data(p)
    p.add_argument("--mode", choices=network.MODES, default=network.RANK, help="rank (NNRank) or class (NNClass)")
    p.add_argument("--hidden", type=int, default=5)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--patience", type=int, default=40)
    p.add_argument("--ensemble", type=int, default=1)
    p.add_argument("--plot", action="store_true", help="also write a training-curve figure")
    _add_training(p)
    _add_output(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gridsearch", help="cross-validated hyperparameter search")
    _add_data(p)
    p.add_argument("--mode", choices=network.MODES, default=network.RANK)
    _add_grid(p)
    _add_training(p)
    _add_output(p)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("predict", help="predict categories for a feature file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--target-col", type=int, default=None, help="drop this column before predicting")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--emit-probs", action="store_true", help="also print the K outputs and their sum")
    p.add_argument("--out", help="write predictions here instead of stdout")
    _add_output(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="zero-one and mean absolute error on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="file whose target column holds categories 1..K")
    p.add_argument("--target-col", type=int, default=-1)
    p.add_argument("--threshold", type=float, default=None)
    _add_output(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="repeated-split NNRank/NNClass benchmark")
    p.add_argument("--manifest", required=True, help="manifest file or directory of *.manifest files")
    p.add_argument("--datasets", type=_names, default=None)
    p.add_argument("--modes", type=_names, default=(network.RANK, network.CLASS))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--ensemble", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-plot", action="store_true")
    _add_grid(p)
    _add_training(p)
    _add_output(p)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DataError, FileNotFoundError) as exc:
        print(f"ordrank: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"ordrank: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"ordrank: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
