"""Gradient-descent training, learning-rate halving, grid search and ensembles."""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import network, rng
from ._kernels import ACT_CODES, online_epoch
from .network import CLASS, RANK, SQUARE_ERROR, NetworkModel

log = logging.getLogger(__name__)

ONLINE = "online"
BATCH = "batch"

BENCH_HIDDEN = tuple(range(1, 16))
BENCH_EPOCHS = (50, 200, 500, 1000)
BENCH_LR = (0.01, 0.05, 0.1, 0.25, 0.5)
BENCH_PATIENCE = (40, 60, 80, 100)


class NumericalError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass(frozen=True)
class TrainingConfig:
    hidden_units: int = 5
    epochs: int = 200
    initial_lr: float = 0.1
    patience: int = 40
    mode: str = ONLINE
    loss: str = SQUARE_ERROR
    seed: int = 0
    init_scale: float = 1.0
    method: str = RANK
    activation: str = "tanh"
    threshold: float = 0.5

    def __post_init__(self):
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.initial_lr > 0:
            raise ValueError("initial_lr must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.mode not in (ONLINE, BATCH):
            raise ValueError(f"mode must be 'online' or 'batch', got {self.mode!r}")
        if self.loss not in network.LOSSES:
            raise ValueError(f"loss must be one of {network.LOSSES}")
        if self.method not in network.MODES:
            raise ValueError(f"method must be one of {network.MODES}")
        if self.activation not in network.ACTIVATIONS:
            raise ValueError(f"activation must be one of {network.ACTIVATIONS}")
        if not self.init_scale > 0:
            raise ValueError("init_scale must be positive")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")

    def out_of_range(self):
        """Messages for values outside the benchmark grid's declared ranges."""
        msgs = []
        if not 1 <= self.hidden_units <= 15:
            msgs.append(f"hidden_units={self.hidden_units} outside [1, 15]")
        if self.epochs not in BENCH_EPOCHS:
            msgs.append(f"epochs={self.epochs} not in {BENCH_EPOCHS}")
        if not 0.01 <= self.initial_lr <= 0.5:
            msgs.append(f"initial_lr={self.initial_lr} outside [0.01, 0.5]")
        if self.patience not in BENCH_PATIENCE:
            msgs.append(f"patience={self.patience} not in {BENCH_PATIENCE}")
        return msgs

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class GridSpec:
    hidden_choices: tuple = BENCH_HIDDEN
    epoch_choices: tuple = BENCH_EPOCHS
    lr_choices: tuple = BENCH_LR
    patience_choices: tuple = BENCH_PATIENCE
    folds: int = 5

    def __post_init__(self):
        for name in ("hidden_choices", "epoch_choices", "lr_choices", "patience_choices"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} is empty")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")

    @property
    def size(self):
        return (
            len(self.hidden_choices)
            * len(self.epoch_choices)
            * len(self.lr_choices)
            * len(self.patience_choices)
        )

    def points(self, base):
        for h, e, lr, p in itertools.product(
            self.hidden_choices, self.epoch_choices, self.lr_choices, self.patience_choices
        ):
            yield replace(base, hidden_units=h, epochs=e, initial_lr=lr, patience=p)


@dataclass
class TrainLog:
    losses: list = field(default_factory=list)
    rates: list = field(default_factory=list)
    halvings: list = field(default_factory=list)  # epochs (1-based) after which lr was halved
    rise_count: int = 0

    def record(self, mean_loss, lr):
        self.losses.append(float(mean_loss))
        self.rates.append(float(lr))

    @property
    def epochs(self):
        return len(self.losses)

    def lines(self):
        for i, (loss, lr) in enumerate(zip(self.losses, self.rates), start=1):
            mark = " halved" if i in self.halvings else ""
            yield f"{i}\t{loss:.17g}\t{lr:.17g}{mark}"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write("epoch\tmean_loss\tlr\n")
            for line in self.lines():
                fh.write(line + "\n")


def lr_schedule_step(log, lr, patience):
    """Advance the rising-loss counter with the latest epoch and return the next rate.

    The counter counts consecutive epochs whose mean loss is strictly above
    the previous epoch's.  Any epoch that does not rise resets it.  When it
    reaches ``patience`` the rate is halved and the counter starts over.
    """
    if not log.losses:
        raise ValueError("lr_schedule_step needs at least one completed epoch")
    if len(log.losses) >= 2 and log.losses[-1] > log.losses[-2]:
        log.rise_count += 1
    else:
        log.rise_count = 0
    if log.rise_count >= patience:
        log.rise_count = 0
        log.halvings.append(len(log.losses))
        return lr / 2.0
    return lr


def init_weights(d, H, K, seed, init_scale=1.0, mode=RANK, activation="tanh", threshold=0.5):
    """Uniform weights in [-s, s] with s = init_scale / sqrt(fan_in); zero biases."""
    if min(d, H, K) < 1:
        raise ValueError("dimensions must be positive")
    g = rng.stream(seed, rng.INIT)
    s1 = init_scale / math.sqrt(d)
    s2 = init_scale / math.sqrt(H)
    W1 = g.uniform(-s1, s1, size=(H, d))
    W2 = g.uniform(-s2, s2, size=(K, H))
    return NetworkModel(W1, np.zeros(H), W2, np.zeros(K), mode=mode, activation=activation, threshold=threshold)


def _batch_epoch(model, X, T, lr, kind):
    hidden, outputs = network.forward(model, X)
    total = network.loss(outputs, T, kind, model.mode)
    grad = network.backward(model, X, hidden, outputs, T, kind)
    n = X.shape[0]
    for p, g in zip(model.params(), grad.params()):
        p -= lr * (g / n)
    return total


def train_snapshots(dataset, config, checkpoints, norm=None):
    """Train once to ``max(checkpoints)`` epochs, copying the model at each checkpoint.

    The model at checkpoint e is identical to the result of ``train`` with
    ``epochs=e`` and otherwise equal settings, since nothing before epoch e
    depends on the total epoch count.
    """
    if dataset.n == 0:
        raise ValueError("cannot train on an empty dataset")
    checkpoints = sorted(set(int(c) for c in checkpoints))
    if not checkpoints or checkpoints[0] < 1:
        raise ValueError("epochs must be >= 1")
    X = np.ascontiguousarray(dataset.features, dtype=float)
    T = np.ascontiguousarray(network.encode_targets(dataset.labels, dataset.K, config.method))
    model = init_weights(
        dataset.d, config.hidden_units, dataset.K, config.seed, config.init_scale,
        config.method, config.activation, config.threshold,
    )
    model.norm = norm
    shuffle = rng.stream(config.seed, rng.SHUFFLE)
    act = ACT_CODES[config.activation]
    rank = config.method == RANK
    relent = config.loss == network.RELATIVE_ENTROPY
    lr = config.initial_lr
    tlog = TrainLog()
    snaps = {}
    n = dataset.n
    for epoch in range(1, checkpoints[-1] + 1):
        if config.mode == ONLINE:
            order = shuffle.permutation(n)
            total = online_epoch(X, T, order, model.W1, model.b1, model.W2, model.b2, lr, act, rank, relent)
        else:
            total = _batch_epoch(model, X, T, lr, config.loss)
        mean_loss = total / n
        if not math.isfinite(mean_loss):
            raise NumericalError(f"non-finite training loss at epoch {epoch} (lr={lr:g})")
        tlog.record(mean_loss, lr)
        lr = lr_schedule_step(tlog, lr, config.patience)
        if epoch in checkpoints:
            snaps[epoch] = model.copy()
    return snaps, tlog


def train(dataset, config, norm=None):
    """Train one network for exactly ``config.epochs`` epochs; return (model, log)."""
    snaps, tlog = train_snapshots(dataset, config, [config.epochs], norm)
    return snaps[config.epochs], tlog


# -- ensembles -------------------------------------------------------------


class Ensemble:
    """Models sharing an architecture whose output vectors are averaged before decoding."""

    def __init__(self, models):
        models = list(models)
        if not models:
            raise ValueError("an ensemble needs at least one model")
        first = models[0]
        for m in models[1:]:
            same = (m.d, m.H, m.K, m.mode, m.threshold) == (first.d, first.H, first.K, first.mode, first.threshold)
            if not same or not _same_norm(m.norm, first.norm):
                raise ValueError("ensemble members must share architecture, mode, threshold and normalization")
        self.models = models

    def __len__(self):
        return len(self.models)

    @property
    def mode(self):
        return self.models[0].mode

    @property
    def threshold(self):
        return self.models[0].threshold

    @property
    def K(self):
        return self.models[0].K

    @property
    def d(self):
        return self.models[0].d

    @property
    def norm(self):
        return self.models[0].norm

    def outputs(self, X):
        return ensemble_outputs(self, X)

    def predict(self, X):
        return network.decode(self.outputs(X), self.mode, self.threshold)

    def prepare(self, X):
        return self.models[0].prepare(X)

    def predict_raw(self, X):
        return self.predict(self.prepare(X))


def _same_norm(a, b):
    if a is None or b is None:
        return a is b
    return np.array_equal(a.mean, b.mean) and np.array_equal(a.stddev, b.stddev)


def ensemble_outputs(ensemble, x):
    """Arithmetic mean of the members' output vectors."""
    outs = [m.outputs(x) for m in ensemble.models]
    return np.mean(outs, axis=0)


def _train_member(args):
    dataset, config, norm = args
    return train(dataset, config, norm)[0]


def train_ensemble(train_data, config, m=5, base_seed=None, norm=None, jobs=1):
    """Train ``m`` models with seeds ``base_seed + 0 .. base_seed + m - 1``."""
    if m < 1:
        raise ValueError("ensemble size must be >= 1")
    base = config.seed if base_seed is None else base_seed
    tasks = [(train_data, replace(config, seed=base + j), norm) for j in range(m)]
    if jobs > 1 and m > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, m)) as pool:
            models = list(pool.map(_train_member, tasks))
    else:
        models = [_train_member(t) for t in tasks]
    return Ensemble(models)


# -- grid search -----------------------------------------------------------


@dataclass(frozen=True)
class GridScore:
    config: TrainingConfig
    score: float  # mean cross-validated MAE
    fold_scores: tuple

    def sort_key(self):
        c = self.config
        return (self.score, c.hidden_units, c.epochs, -c.initial_lr, c.patience)


def cv_folds(n, folds, seed):
    """Seeded partition of ``range(n)`` into ``folds`` near-equal validation blocks."""
    if n < folds:
        raise ValueError(f"need at least {folds} rows for {folds}-fold cross-validation, got {n}")
    perm = rng.stream(seed, rng.FOLDS).permutation(n)
    return [np.sort(block) for block in np.array_split(perm, folds)]


def _mae(pred, truth):
    return float(np.mean(np.abs(np.asarray(pred) - np.asarray(truth))))


def score_grid(train_data, grid, seed, base=None):
    """Cross-validated MAE for every grid point, best first.

    Within a fold all points share one training seed, and points that differ
    only in epoch count are read off a single run's checkpoints.
    """
    base = base or TrainingConfig()
    blocks = cv_folds(train_data.n, grid.folds, seed)
    all_idx = np.arange(train_data.n)
    fold_scores = {}
    for f, val_idx in enumerate(blocks):
        fit_idx = np.setdiff1d(all_idx, val_idx)
        fit, val = train_data.subset(fit_idx), train_data.subset(val_idx)
        fold_seed = rng.derive_seed(seed, f)
        for h, lr, p in itertools.product(grid.hidden_choices, grid.lr_choices, grid.patience_choices):
            cfg = replace(base, hidden_units=h, initial_lr=lr, patience=p, seed=fold_seed)
            snaps, _ = train_snapshots(fit, cfg, grid.epoch_choices)
            for e in grid.epoch_choices:
                key = (h, e, lr, p)
                fold_scores.setdefault(key, []).append(_mae(snaps[e].predict(val.features), val.labels))
    scores = []
    for cfg in grid.points(base):
        fs = fold_scores[(cfg.hidden_units, cfg.epochs, cfg.initial_lr, cfg.patience)]
        scores.append(GridScore(replace(cfg, seed=base.seed), float(np.mean(fs)), tuple(fs)))
    scores.sort(key=GridScore.sort_key)
    return scores


def grid_search(train_data, grid, seed, base=None):
    """Pick the grid point with the lowest mean cross-validated MAE.

    Ties go to fewer hidden units, then fewer epochs, then the larger
    learning rate, then the smaller patience.
    """
    base = base or TrainingConfig()
    if grid.size == 1:
        return next(grid.points(base))
    return score_grid(train_data, grid, seed, base)[0].config


def write_grid_table(scores, path):
    with open(path, "w") as fh:
        fh.write("rank\thidden_units\tepochs\tinitial_lr\tpatience\tcv_mae\tfold_mae\n")
        for i, s in enumerate(scores, start=1):
            c = s.config
            folds = ",".join(format(v, ".17g") for v in s.fold_scores)
            fh.write(
                f"{i}\t{c.hidden_units}\t{c.epochs}\t{c.initial_lr:.17g}\t{c.patience}\t{s.score:.17g}\t{folds}\n"
            )
