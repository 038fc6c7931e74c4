"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def logistic_gd(X, y, w0, b0, lr, l2, epochs):
    n = X.shape[0]
    w = np.array(w0, dtype=np.float64)
    b = float(b0)
    for _ in range(int(epochs)):
        g = sigmoid(X @ w + b) - y
        w = w - lr * (X.T @ g / n + l2 * w)
        b = b - lr * (g.sum() / n)
    return w, b


def adjudicate_batch(S, a, b, tie):
    n, k = S.shape
    labels = np.zeros(n, dtype=np.int8)
    deciders = np.full(n, k - 1, dtype=np.int64)
    undecided = np.ones(n, dtype=bool)
    for m in range(k):
        s = S[:, m]
        low = undecided & (s < a)
        high = undecided & (s > b)
        labels[high] = 1
        deciders[low | high] = m
        undecided &= ~(low | high)
    last = S[undecided, k - 1]
    labels[undecided] = (last > tie).astype(np.int8)
    scores = S[np.arange(n), deciders]
    return labels, deciders, scores


def pair_joint_counts(F, pairs):
    F = np.asarray(F, dtype=bool)
    return (F[pairs[:, 0]] & F[pairs[:, 1]]).sum(axis=1).astype(np.int64)
