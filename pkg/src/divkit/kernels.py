"""Kernel dispatch: the Cython extension when it was built, numpy otherwise.

Set ``DIVKIT_PURE=1`` before import to force the numpy path.
"""
import os

import numpy as np

from . import _fallback

BACKEND = "numpy"
_impl = _fallback
if os.environ.get("DIVKIT_PURE") != "1":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

sigmoid = _fallback.sigmoid


def logistic_gd(X, y, w0, b0, lr, l2, epochs, impl=None):
    """Full-batch gradient descent on mean cross-entropy + (l2/2)||w||^2."""
    impl = impl or _impl
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w0 = np.ascontiguousarray(w0, dtype=np.float64)
    w, b = impl.logistic_gd(X, y, w0, float(b0), float(lr), float(l2), int(epochs))
    return np.asarray(w, dtype=np.float64), float(b)


def adjudicate_batch(S, a, b, tie, impl=None):
    """Eager cascade adjudication over an (n, k) score matrix.

    Returns (labels, deciding model index, deciding score) arrays.
    """
    impl = impl or _impl
    S = np.ascontiguousarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[1] == 0:
        raise ValueError("score matrix must be (n, k) with k >= 1")
    return impl.adjudicate_batch(S, float(a), float(b), float(tie))


def pair_joint_counts(F, pairs, impl=None):
    """Joint failure counts for each (u, v) row of ``pairs`` over failure matrix ``F``."""
    impl = impl or _impl
    F = np.ascontiguousarray(F, dtype=np.uint8)
    pairs = np.ascontiguousarray(pairs, dtype=np.int64).reshape(-1, 2)
    return np.asarray(impl.pair_joint_counts(F, pairs), dtype=np.int64)
