"""Dataset ingestion, equal-interval discretization, splits and scaling."""

import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from . import rng


class DataError(ValueError):
    """Raised for malformed or unusable input data."""


@dataclass(frozen=True)
class RawDataset:
    """Rows of real features with a real-valued (metric) target."""

    features: np.ndarray  # (n, d)
    targets: np.ndarray  # (n,)

    def __post_init__(self):
        if self.features.ndim != 2 or self.targets.ndim != 1:
            raise DataError("features must be 2-D and targets 1-D")
        if self.features.shape[0] != self.targets.shape[0]:
            raise DataError("features and targets differ in length")
        if self.features.shape[1] < 1:
            raise DataError("need at least one feature column")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]


@dataclass(frozen=True)
class OrdinalDataset:
    """Rows of real features with an ordinal label in 1..K."""

    features: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,) int
    K: int
    edges: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        if self.K < 2:
            raise DataError(f"K must be >= 2, got {self.K}")
        if self.features.ndim != 2 or self.labels.ndim != 1:
            raise DataError("features must be 2-D and labels 1-D")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError("features and labels differ in length")
        if self.labels.size and (self.labels.min() < 1 or self.labels.max() > self.K):
            raise DataError(f"labels must lie in 1..{self.K}")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.int64)
        return OrdinalDataset(self.features[idx], self.labels[idx], self.K, self.edges)

    def with_features(self, features):
        return OrdinalDataset(np.asarray(features, dtype=float), self.labels, self.K, self.edges)


@dataclass(frozen=True)
class SplitPlan:
    train_count: int
    seed: int = 0
    trials: int = 20


@dataclass(frozen=True)
class NormStats:
    mean: np.ndarray
    stddev: np.ndarray

    def apply(self, X):
        X = np.asarray(X, dtype=float)
        return (X - self.mean) / self.stddev


_SPLIT_RE = re.compile(r"[,\s]+")


def read_table(path):
    """Parse a comma- or whitespace-delimited numeric file into a 2-D array.

    Lines starting with ``#`` and blank lines are skipped. Error messages
    refer to 1-based file line numbers ("row") and column numbers.
    """
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        cells = [c for c in _SPLIT_RE.split(text) if c != ""]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataError(
                f"{path}: row {lineno} has {len(cells)} columns, expected {width}"
            )
        row = []
        for col, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {lineno}, column {col}: cannot parse {cell!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise DataError(f"{path}: row {lineno}, column {col}: non-finite value {cell!r}")
            row.append(value)
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no rows")
    return np.array(rows, dtype=float)


def load_csv(path, target_column):
    """Load a delimited file, splitting off ``target_column`` (0-based, negatives allowed)."""
    table = read_table(path)
    ncols = table.shape[1]
    col = int(target_column)
    if not -ncols <= col < ncols:
        raise DataError(f"target column {target_column} out of range for {ncols} columns")
    col %= ncols
    if ncols < 2:
        raise DataError(f"{path}: need at least one feature column besides the target")
    features = np.delete(table, col, axis=1)
    return RawDataset(features, table[:, col].copy())


def load_features(path, d=None):
    """Load a feature-only file; optionally check its width against ``d``."""
    X = read_table(path)
    if d is not None and X.shape[1] != d:
        raise DataError(f"{path}: expected {d} feature columns, found {X.shape[1]}")
    return X


def load_ordinal_csv(path, label_column, K):
    """Load a file whose ``label_column`` already holds integer categories 1..K."""
    raw = load_csv(path, label_column)
    labels = raw.targets
    if np.any(labels != np.round(labels)):
        raise DataError(f"{path}: label column holds non-integer values")
    return OrdinalDataset(raw.features, labels.astype(np.int64), int(K))


def bin_edges(lo, hi, K):
    """Interior-and-outer boundaries of K equal-width bins on [lo, hi]."""
    width = (hi - lo) / K
    return np.array([lo + i * width for i in range(K)] + [hi])


def discretize_targets(targets, K, lo=None, hi=None):
    targets = np.asarray(targets, dtype=float)
    if K < 2:
        raise DataError(f"K must be >= 2, got {K}")
    lo = targets.min() if lo is None else lo
    hi = targets.max() if hi is None else hi
    if not hi > lo:
        raise DataError("all targets are equal; cannot discretize a zero range")
    width = (hi - lo) / K
    cats = np.floor((targets - lo) / width).astype(np.int64) + 1
    return np.clip(cats, 1, K)


def discretize_equal_interval(raw, K):
    """Map metric targets to categories 1..K using K equal-width bins.

    Bins are half-open ``[low, high)`` except the last, which is closed so
    the maximum target lands in category K.
    """
    labels = discretize_targets(raw.targets, K)
    edges = bin_edges(raw.targets.min(), raw.targets.max(), K)
    return OrdinalDataset(raw.features, labels, int(K), edges)


def make_splits(n, plan):
    """Seeded random train/test partitions, one pair of sorted index arrays per trial."""
    if not 0 < plan.train_count < n:
        raise DataError(f"train_count must satisfy 0 < train_count < {n}, got {plan.train_count}")
    if plan.trials < 1:
        raise DataError("trials must be positive")
    splits = []
    for trial in range(plan.trials):
        perm = rng.stream(plan.seed, rng.SPLITS, trial).permutation(n)
        train = np.sort(perm[: plan.train_count])
        test = np.sort(perm[plan.train_count:])
        splits.append((train, test))
    return splits


def fit_norm(train_features):
    X = np.asarray(train_features, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("training features must be a non-empty 2-D array")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = X.max(axis=0) == X.min(axis=0)
    std[constant] = 1.0
    return NormStats(mean, std)


def normalize(train_features, test_features):
    """Standardize both sets with statistics from the training set only."""
    stats = fit_norm(train_features)
    test = np.asarray(test_features, dtype=float)
    if test.ndim != 2 or test.shape[1] != stats.mean.shape[0]:
        raise DataError("test features have a different dimension from training features")
    return stats.apply(train_features), stats.apply(test), stats


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    path: str
    target_column: int
    K: int = 5
    train_count: int = 0

    def load(self):
        return load_csv(self.path, self.target_column)


def read_manifest(path):
    """Read one ``key=value`` manifest file."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise DataError(f"{path}: line {lineno}: expected key=value")
            key, value = (s.strip() for s in text.split("=", 1))
            values[key] = value
    missing = {"name", "path", "target_column", "train_count"} - values.keys()
    if missing:
        raise DataError(f"{path}: missing keys {sorted(missing)}")
    data_path = values["path"]
    if not os.path.isabs(data_path):
        data_path = os.path.join(os.path.dirname(os.path.abspath(path)), data_path)
    return ManifestEntry(
        name=values["name"],
        path=data_path,
        target_column=int(values["target_column"]),
        K=int(values.get("K", 5)),
        train_count=int(values["train_count"]),
    )


def read_manifests(location):
    """Read a manifest file, or every ``*.manifest`` file in a directory (sorted by name)."""
    if os.path.isdir(location):
        files = sorted(f for f in os.listdir(location) if f.endswith(".manifest"))
        if not files:
            raise DataError(f"no *.manifest files in {location}")
        entries = [read_manifest(os.path.join(location, f)) for f in files]
    else:
        entries = [read_manifest(location)]
    return {e.name: e for e in entries}


def write_table(path, features, last_column=None, fmt=".17g"):
    """Write rows as comma-separated values, optionally appending one more column."""
    with open(path, "w") as fh:
        for i, row in enumerate(np.asarray(features)):
            cells = [format(float(v), fmt) for v in row]
            if last_column is not None:
                v = last_column[i]
                cells.append(str(int(v)) if isinstance(v, (int, np.integer)) else format(float(v), fmt))
            fh.write(",".join(cells) + "\n")
