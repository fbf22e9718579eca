"""Compiled inner loop for online (per-example) gradient descent.

Mirrors ``network.forward``/``network.backward`` exactly; the tests check the
two paths against each other.
"""

import math

import numpy as np
from numba import njit

ACT_TANH = 0
ACT_SIGMOID = 1
ACT_LINEAR = 2

ACT_CODES = {"tanh": ACT_TANH, "sigmoid": ACT_SIGMOID, "linear": ACT_LINEAR}

LOG_CLAMP = 1e-12


@njit(cache=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(cache=True)
def _clamp(p):
    if p < LOG_CLAMP:
        return LOG_CLAMP
    if p > 1.0 - LOG_CLAMP:
        return 1.0 - LOG_CLAMP
    return p


@njit(cache=True)
def online_epoch(X, T, order, W1, b1, W2, b2, lr, act, rank, relent):
    """One pass over ``order``, updating the weights in place after every example.

    Returns the summed loss, each term evaluated before that example's update.
    """
    H, d = W1.shape
    K = W2.shape[0]
    h = np.empty(H)
    o = np.empty(K)
    delta2 = np.empty(K)
    delta1 = np.empty(H)
    total = 0.0
    for idx in order:
        x = X[idx]
        t = T[idx]
        for j in range(H):
            a = b1[j]
            for i in range(d):
                a += W1[j, i] * x[i]
            if act == ACT_TANH:
                h[j] = math.tanh(a)
            elif act == ACT_SIGMOID:
                h[j] = _sigmoid(a)
            else:
                h[j] = a
        if rank:
            for k in range(K):
                z = b2[k]
                for j in range(H):
                    z += W2[k, j] * h[j]
                o[k] = _sigmoid(z)
        else:
            zmax = -np.inf
            for k in range(K):
                z = b2[k]
                for j in range(H):
                    z += W2[k, j] * h[j]
                o[k] = z
                if z > zmax:
                    zmax = z
            s = 0.0
            for k in range(K):
                o[k] = math.exp(o[k] - zmax)
                s += o[k]
            for k in range(K):
                o[k] /= s

        if relent:
            for k in range(K):
                p = _clamp(o[k])
                if rank:
                    total -= t[k] * math.log(p) + (1.0 - t[k]) * math.log(1.0 - p)
                else:
                    total -= t[k] * math.log(p)
                delta2[k] = o[k] - t[k]
        else:
            for k in range(K):
                total += (t[k] - o[k]) ** 2
            if rank:
                for k in range(K):
                    delta2[k] = -2.0 * (t[k] - o[k]) * o[k] * (1.0 - o[k])
            else:
                go = 0.0
                for k in range(K):
                    go += -2.0 * (t[k] - o[k]) * o[k]
                for k in range(K):
                    delta2[k] = o[k] * (-2.0 * (t[k] - o[k]) - go)

        for j in range(H):
            s = 0.0
            for k in range(K):
                s += delta2[k] * W2[k, j]
            if act == ACT_TANH:
                delta1[j] = s * (1.0 - h[j] * h[j])
            elif act == ACT_SIGMOID:
                delta1[j] = s * h[j] * (1.0 - h[j])
            else:
                delta1[j] = s

        for k in range(K):
            for j in range(H):
                W2[k, j] -= lr * delta2[k] * h[j]
            b2[k] -= lr * delta2[k]
        for j in range(H):
            for i in range(d):
                W1[j, i] -= lr * delta1[j] * x[i]
            b1[j] -= lr * delta1[j]
    return total
