"""One-hidden-layer feedforward network with ordinal (rank) or softmax (class) outputs.

In ``rank`` mode every output node applies its own logistic sigmoid and the
target for category k is the cumulative vector ``(1, ..., 1, 0, ..., 0)``
with k leading ones.  In ``class`` mode the outputs are a softmax and the
target is one-hot.  Both modes share the forward pass, the losses and the
backpropagation code; only the output transfer function and its derivative
differ.
"""

from dataclasses import dataclass, replace

import numpy as np

from .data import NormStats

RANK = "rank"
CLASS = "class"
MODES = (RANK, CLASS)

SQUARE_ERROR = "square_error"
RELATIVE_ENTROPY = "relative_entropy"
LOSSES = (SQUARE_ERROR, RELATIVE_ENTROPY)

ACTIVATIONS = ("tanh", "sigmoid", "linear")

LOG_CLAMP = 1e-12


def sigmoid(z):
    """Overflow-safe logistic function."""
    return np.exp(-np.logaddexp(0.0, -np.asarray(z, dtype=float)))


def softmax(z):
    z = np.asarray(z, dtype=float)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def activate(a, name):
    if name == "tanh":
        return np.tanh(a)
    if name == "sigmoid":
        return sigmoid(a)
    if name == "linear":
        return np.asarray(a, dtype=float)
    raise ValueError(f"unknown activation {name!r}")


def activation_grad(h, name):
    """Derivative of the hidden activation expressed through its output ``h``."""
    if name == "tanh":
        return 1.0 - h * h
    if name == "sigmoid":
        return h * (1.0 - h)
    if name == "linear":
        return np.ones_like(h)
    raise ValueError(f"unknown activation {name!r}")


@dataclass
class NetworkModel:
    """Weights and metadata of a d-H-K network.

    ``W1`` is H x d, ``W2`` is K x H.  ``norm`` holds the feature
    standardization learned from the training data, if any; ``forward``
    expects already-normalized inputs, ``predict_raw`` applies ``norm``.
    """

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    mode: str = RANK
    activation: str = "tanh"
    threshold: float = 0.5
    norm: NormStats = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        H, d = self.W1.shape
        K, H2 = self.W2.shape
        if H2 != H or self.b1.shape != (H,) or self.b2.shape != (K,):
            raise ValueError("inconsistent weight shapes")

    @property
    def d(self):
        return self.W1.shape[1]

    @property
    def H(self):
        return self.W1.shape[0]

    @property
    def K(self):
        return self.W2.shape[0]

    def copy(self):
        return replace(self, W1=self.W1.copy(), b1=self.b1.copy(), W2=self.W2.copy(), b2=self.b2.copy())

    def params(self):
        return (self.W1, self.b1, self.W2, self.b2)

    def outputs(self, X):
        return forward(self, X)[1]

    def predict(self, X):
        """Decoded categories for normalized inputs."""
        return decode(self.outputs(X), self.mode, self.threshold)

    def prepare(self, X):
        X = np.asarray(X, dtype=float)
        return X if self.norm is None else self.norm.apply(X)

    def predict_raw(self, X):
        return self.predict(self.prepare(X))


@dataclass
class Gradient:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def params(self):
        return (self.W1, self.b1, self.W2, self.b2)


def encode_target(k, K, mode=RANK):
    """Target vector for category ``k`` (1-based) out of ``K``."""
    if not 1 <= k <= K:
        raise ValueError(f"category {k} outside 1..{K}")
    t = np.zeros(K)
    if mode == RANK:
        t[:k] = 1.0
    elif mode == CLASS:
        t[k - 1] = 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return t


def encode_targets(labels, K, mode=RANK):
    """Row-wise :func:`encode_target` for an array of labels."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 1 or labels.max() > K):
        raise ValueError(f"labels outside 1..{K}")
    idx = np.arange(1, K + 1)
    if mode == RANK:
        return (idx[None, :] <= labels[:, None]).astype(float)
    if mode == CLASS:
        return (idx[None, :] == labels[:, None]).astype(float)
    raise ValueError(f"unknown mode {mode!r}")


def forward(model, x):
    """Hidden activations and outputs for one input vector or a row-stacked batch."""
    x = np.asarray(x, dtype=float)
    hidden = activate(x @ model.W1.T + model.b1, model.activation)
    z = hidden @ model.W2.T + model.b2
    outputs = sigmoid(z) if model.mode == RANK else softmax(z)
    return hidden, outputs


def loss(outputs, target, kind=SQUARE_ERROR, mode=RANK):
    """Per-example loss to be minimized (summed over rows for a batch).

    Relative entropy in rank mode is the summed binary cross-entropy over the
    independent output nodes.  In class mode it is the multinomial
    cross-entropy ``-sum t_i log o_i`` so that its softmax delta is ``o - t``.
    """
    o = np.asarray(outputs, dtype=float)
    t = np.asarray(target, dtype=float)
    if kind == SQUARE_ERROR:
        return float(np.sum((t - o) ** 2))
    if kind == RELATIVE_ENTROPY:
        oc = np.clip(o, LOG_CLAMP, 1.0 - LOG_CLAMP)
        if mode == RANK:
            return float(-np.sum(t * np.log(oc) + (1.0 - t) * np.log(1.0 - oc)))
        return float(-np.sum(t * np.log(oc)))
    raise ValueError(f"unknown loss {kind!r}")


def output_delta(outputs, target, kind=SQUARE_ERROR, mode=RANK):
    """Derivative of the loss with respect to the output nodes' net inputs."""
    o = np.asarray(outputs, dtype=float)
    t = np.asarray(target, dtype=float)
    if kind == RELATIVE_ENTROPY:
        return o - t
    if kind != SQUARE_ERROR:
        raise ValueError(f"unknown loss {kind!r}")
    if mode == RANK:
        return -2.0 * (t - o) * o * (1.0 - o)
    # softmax Jacobian: dL/dz_j = o_j * (g_j - sum_i g_i o_i) with g = dL/do
    g = -2.0 * (t - o)
    return o * (g - np.sum(g * o, axis=-1, keepdims=True))


def backward(model, x, hidden, outputs, target, kind=SQUARE_ERROR):
    """Gradient of the loss for one example, or summed over a row-stacked batch."""
    x = np.asarray(x, dtype=float)
    delta2 = output_delta(outputs, target, kind, model.mode)
    delta1 = (delta2 @ model.W2) * activation_grad(hidden, model.activation)
    if x.ndim == 1:
        return Gradient(np.outer(delta1, x), delta1, np.outer(delta2, hidden), delta2)
    return Gradient(delta1.T @ x, delta1.sum(axis=0), delta2.T @ hidden, delta2.sum(axis=0))


def predict_category(outputs, T=0.5):
    """Threshold-scan decoding for rank-mode outputs.

    Outputs are read in category order and the scan stops at the first one
    not strictly above ``T``; the result is the number of nodes passed
    before stopping, or 1 if even the first node is below the threshold.
    Accepts one output vector or a row-stacked batch.
    """
    o = np.asarray(outputs, dtype=float)
    above = o > T
    count = np.cumprod(above, axis=-1).sum(axis=-1)
    cats = np.maximum(count, 1)
    return int(cats) if o.ndim == 1 else cats.astype(np.int64)


def predict_class(outputs):
    """Argmax decoding, ties going to the lowest category."""
    o = np.asarray(outputs, dtype=float)
    cats = np.argmax(o, axis=-1) + 1
    return int(cats) if o.ndim == 1 else cats.astype(np.int64)


def decode(outputs, mode, T=0.5):
    return predict_category(outputs, T) if mode == RANK else predict_class(outputs)


def cumulative_score(outputs):
    """Sum of rank-mode outputs: an estimate of how many categories the point belongs to."""
    return np.asarray(outputs, dtype=float).sum(axis=-1)


# -- persistence -----------------------------------------------------------

HEADER = "ordrank-model v1"


def _fmt(values):
    return " ".join(format(float(v), ".17g") for v in np.ravel(values))


def dumps_model(model):
    lines = [
        HEADER,
        f"mode {model.mode}",
        f"d {model.d}",
        f"H {model.H}",
        f"K {model.K}",
        f"activation {model.activation}",
        f"threshold {format(float(model.threshold), '.17g')}",
    ]
    if model.norm is None:
        lines += ["norm_mean none", "norm_stddev none"]
    else:
        lines += [f"norm_mean {_fmt(model.norm.mean)}", f"norm_stddev {_fmt(model.norm.stddev)}"]
    lines.append("W1")
    lines += [_fmt(row) for row in model.W1]
    lines.append("b1")
    lines.append(_fmt(model.b1))
    lines.append("W2")
    lines += [_fmt(row) for row in model.W2]
    lines.append("b2")
    lines.append(_fmt(model.b2))
    return "\n".join(lines) + "\n"


def _parse_block(lines, start):
    """Parse one model block beginning at ``lines[start]``; return (model, next index)."""

    def take(i, key):
        if i >= len(lines):
            raise ValueError(f"model file line {i + 1}: expected {key!r}, found end of file")
        parts = lines[i].split()
        if not parts or parts[0] != key:
            raise ValueError(f"model file line {i + 1}: expected {key!r}, found {lines[i]!r}")
        return parts[1:]

    def vec(text_parts, n, what):
        vals = np.array([float(v) for v in text_parts])
        if vals.shape != (n,):
            raise ValueError(f"model file: {what} has {vals.size} values, expected {n}")
        return vals

    if lines[start].strip() != HEADER:
        raise ValueError(f"model file line {start + 1}: missing header {HEADER!r}")
    i = start + 1
    mode = take(i, "mode")[0]
    d = int(take(i + 1, "d")[0])
    H = int(take(i + 2, "H")[0])
    K = int(take(i + 3, "K")[0])
    activation = take(i + 4, "activation")[0]
    threshold = float(take(i + 5, "threshold")[0])
    mean_parts = take(i + 6, "norm_mean")
    std_parts = take(i + 7, "norm_stddev")
    norm = None
    if mean_parts != ["none"]:
        norm = NormStats(vec(mean_parts, d, "norm_mean"), vec(std_parts, d, "norm_stddev"))
    i += 8
    take(i, "W1")
    W1 = np.array([vec(lines[i + 1 + r].split(), d, "W1 row") for r in range(H)]).reshape(H, d)
    i += 1 + H
    take(i, "b1")
    b1 = vec(lines[i + 1].split(), H, "b1")
    i += 2
    take(i, "W2")
    W2 = np.array([vec(lines[i + 1 + r].split(), H, "W2 row") for r in range(K)]).reshape(K, H)
    i += 1 + K
    take(i, "b2")
    b2 = vec(lines[i + 1].split(), K, "b2")
    i += 2
    model = NetworkModel(W1, b1, W2, b2, mode=mode, activation=activation, threshold=threshold, norm=norm)
    return model, i


def loads_models(text):
    """Parse one or more concatenated model blocks."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    models = []
    i = 0
    while i < len(lines):
        model, i = _parse_block(lines, i)
        models.append(model)
    if not models:
        raise ValueError("model file is empty")
    return models


def save_model(model_or_models, path):
    """Write one model, or several concatenated (an ensemble), to ``path``."""
    models = model_or_models if isinstance(model_or_models, (list, tuple)) else [model_or_models]
    with open(path, "w") as fh:
        for m in models:
            fh.write(dumps_model(m))


def load_models(path):
    with open(path) as fh:
        return loads_models(fh.read())


def load_model(path):
    models = load_models(path)
    if len(models) != 1:
        raise ValueError(f"{path} holds {len(models)} models; use load_models")
    return models[0]
