"""The compiled kernels and the numpy fallback must agree."""
import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from divkit import _fallback, kernels

try:
    from divkit import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="Cython extension not built")
IMPLS = [pytest.param(_fallback, id="numpy"), pytest.param(_kernels, id="cython", marks=needs_ext)]


@needs_ext
@pytest.mark.parametrize("n,d", [(1, 1), (7, 3), (500, 20)])
def test_logistic_gd_backends_agree(n, d):
    rng = np.random.default_rng(n * d)
    X = rng.normal(size=(n, d))
    y = rng.integers(0, 2, n)
    w0 = rng.uniform(-0.01, 0.01, d)
    wc, bc = kernels.logistic_gd(X, y, w0, 0.003, 0.1, 1e-4, 200, impl=_kernels)
    wf, bf = kernels.logistic_gd(X, y, w0, 0.003, 0.1, 1e-4, 200, impl=_fallback)
    np.testing.assert_allclose(wc, wf, rtol=1e-10, atol=1e-12)
    assert bc == pytest.approx(bf, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("impl", IMPLS)
def test_adjudicate_batch_matches_python_loop(impl):
    rng = np.random.default_rng(3)
    S = np.round(rng.random((2000, 3)), 1)
    labels, deciders, scores = kernels.adjudicate_batch(S, 0.3, 0.7, 0.5, impl=impl)
    for row, lab, dec, sc in zip(S, labels, deciders, scores):
        k = next((i for i, s in enumerate(row) if s < 0.3 or s > 0.7), 2)
        s = row[k]
        want = 0 if s < 0.3 else 1 if s > 0.7 else int(s > 0.5)
        assert (lab, dec, sc) == (want, k, s)


@pytest.mark.parametrize("impl", IMPLS)
def test_pair_joint_counts(impl):
    rng = np.random.default_rng(5)
    F = rng.random((30, 400)) < 0.2
    pairs = np.array([[0, 1], [5, 29], [3, 3]])
    got = kernels.pair_joint_counts(F, pairs, impl=impl)
    want = [sum(F[u, j] and F[v, j] for j in range(400)) for u, v in pairs]
    assert got.tolist() == want


def test_backend_selection_respects_env():
    code = "import divkit.kernels as k; print(k.BACKEND)"
    env = {**os.environ, "DIVKIT_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    assert kernels.BACKEND in ("numpy", "cython")


def test_sigmoid_stable_at_extremes():
    z = np.array([-800.0, -30.0, 0.0, 30.0, 800.0])
    s = kernels.sigmoid(z)
    assert np.all(np.isfinite(s))
    assert s[2] == 0.5 and s[0] == 0.0 and s[-1] == 1.0
