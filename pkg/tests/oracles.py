"""Independent reference computations used by several test modules."""

import math

import numpy as np

from ordrank import network


def numeric_gradient(model, x, target, kind, step=1e-5):
    """Central finite differences of the per-example loss for every weight."""
    grads = []
    for p in model.params():
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            orig = p[i]
            p[i] = orig + step
            up = network.loss(network.forward(model, x)[1], target, kind, model.mode)
            p[i] = orig - step
            down = network.loss(network.forward(model, x)[1], target, kind, model.mode)
            p[i] = orig
            g[i] = (up - down) / (2 * step)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric, floor=1e-8):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.abs(a) + np.abs(n), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def random_model(g, d, H, K, mode, activation, scale=1.0):
    return network.NetworkModel(
        g.normal(scale=scale, size=(H, d)),
        g.normal(scale=scale, size=H),
        g.normal(scale=scale, size=(K, H)),
        g.normal(scale=scale, size=K),
        mode=mode,
        activation=activation,
    )


def scan_interpreter(outputs, T):
    """Literal reading of the decoding rule, one node at a time.

    Visit O_1, O_2, ... in order.  Stop when a node's output is smaller
    than T (ties treated as smaller) or when no nodes are left.  Answer the
    index of the last visited node whose output was bigger than T, or 1 if
    there was none.
    """
    last_bigger = None
    i = 0
    while i < len(outputs):
        value = outputs[i]
        if not value > T:
            break
        last_bigger = i + 1
        i += 1
    return 1 if last_bigger is None else last_bigger


def perceptron_separates(X, y, epochs=1000):
    """Rosenblatt perceptron with bias; True once an epoch makes no mistakes."""
    w = np.zeros(X.shape[1])
    b = 0.0
    s = np.where(y == 2, 1.0, -1.0)
    for _ in range(epochs):
        mistakes = 0
        for xi, si in zip(X, s):
            if si * (xi @ w + b) <= 0:
                w += si * xi
                b += si
                mistakes += 1
        if mistakes == 0:
            return True
    return False


def sq_loss_by_hand(t, o):
    total = 0.0
    for ti, oi in zip(t, o):
        total += (ti - oi) * (ti - oi)
    return total


def xent_by_hand(t, o):
    return -sum(ti * math.log(oi) + (1 - ti) * math.log(1 - oi) for ti, oi in zip(t, o))


def normwise_relative_error(analytic, numeric):
    """Worst ||a - n|| / (||a|| + ||n||) over the parameter arrays (0 for two zero arrays)."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.linalg.norm(a) + np.linalg.norm(n)
        if denom > 0:
            worst = max(worst, float(np.linalg.norm(a - n) / denom))
    return worst
