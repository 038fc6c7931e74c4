# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics mirror divkit._fallback exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


cdef inline double _sigmoid(double z) nogil:
    cdef double e
    if z >= 0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


def logistic_gd(const double[:, ::1] X, const double[::1] y, const double[::1] w0,
                double b0, double lr, double l2, long epochs):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j, ep
    cdef double[::1] w = np.array(w0, dtype=np.float64)
    cdef double[::1] gw = np.zeros(d, dtype=np.float64)
    cdef double b = b0, z, g, gb, inv_n = 1.0 / n
    with nogil:
        for ep in range(epochs):
            for j in range(d):
                gw[j] = 0.0
            gb = 0.0
            for i in range(n):
                z = b
                for j in range(d):
                    z = z + X[i, j] * w[j]
                g = _sigmoid(z) - y[i]
                gb = gb + g
                for j in range(d):
                    gw[j] = gw[j] + g * X[i, j]
            for j in range(d):
                w[j] = w[j] - lr * (gw[j] * inv_n + l2 * w[j])
            b = b - lr * (gb * inv_n)
    return np.asarray(w), b


def adjudicate_batch(const double[:, ::1] S, double a, double b, double tie):
    cdef Py_ssize_t n = S.shape[0], k = S.shape[1], i, m
    cdef double s
    labels = np.empty(n, dtype=np.int8)
    deciders = np.empty(n, dtype=np.int64)
    scores = np.empty(n, dtype=np.float64)
    cdef signed char[::1] lab = labels
    cdef long long[::1] dec = deciders
    cdef double[::1] sc = scores
    with nogil:
        for i in range(n):
            for m in range(k):
                s = S[i, m]
                if s < a:
                    lab[i] = 0
                    break
                if s > b:
                    lab[i] = 1
                    break
                if m == k - 1:
                    lab[i] = 1 if s > tie else 0
            dec[i] = m if m < k else k - 1
            sc[i] = S[i, dec[i]]
    return labels, deciders, scores


def pair_joint_counts(const unsigned char[:, ::1] F, const long long[:, ::1] pairs):
    cdef Py_ssize_t p = pairs.shape[0], m = F.shape[1], q, j
    cdef long long u, v, c
    out = np.empty(p, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for q in range(p):
            u = pairs[q, 0]
            v = pairs[q, 1]
            c = 0
            for j in range(m):
                c = c + (F[u, j] & F[v, j])
            o[q] = c
    return out
