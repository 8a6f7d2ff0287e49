import os
import subprocess
import sys

import numpy as np
import pytest

from lsestop import _pykernels, kernels

compiled = pytest.importorskip("lsestop._speedups")


def test_default_backend_is_compiled():
    if os.environ.get("LSESTOP_PURE_PYTHON") == "1":
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "compiled"


def test_env_var_forces_fallback():
    code = "from lsestop import kernels; print(kernels.BACKEND)"
    env = {**os.environ, "LSESTOP_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_tri_probs_agree():
    rng = np.random.default_rng(0)
    n = 5000
    mu = rng.normal(scale=10, size=n)
    sigma = np.where(rng.random(n) < 0.1, 0.0, rng.exponential(2.0, size=n))
    eps = rng.exponential(3.0, size=n) + 1e-9
    a = _pykernels.tri_probs(mu, sigma, 0.5, eps)
    b = compiled.tri_probs(mu, sigma, 0.5, eps)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-15)


def test_tri_probs_agree_scalar_eps():
    mu = np.linspace(-5, 5, 101)
    sigma = np.full(101, 0.7)
    for x, y in zip(_pykernels.tri_probs(mu, sigma, 0.0, 1.3), compiled.tri_probs(mu, sigma, 0.0, 1.3)):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-15)


def test_count_and_fscores_agree():
    rng = np.random.default_rng(1)
    paths = rng.normal(size=(3000, 40))
    labels = rng.integers(0, 3, size=40).astype(np.int8)
    half = np.full(40, 2.5)
    # make some paths satisfy the labels
    paths[:500] = np.where(labels == 0, 1.0, np.where(labels == 1, -1.0, 0.1))
    assert _pykernels.count_eps_accurate(paths, labels, 0.0, half) == \
        compiled.count_eps_accurate(paths, labels, 0.0, half) >= 500
    pred = rng.random(40) < 0.5
    np.testing.assert_allclose(_pykernels.path_fscores(paths, pred, 0.0),
                               compiled.path_fscores(paths, pred, 0.0), rtol=1e-15)


def test_fscore_empty_sets_is_one():
    paths = -np.ones((3, 4))
    pred = np.zeros(4, dtype=bool)
    np.testing.assert_array_equal(compiled.path_fscores(paths, pred, 0.0), 1.0)
    np.testing.assert_array_equal(_pykernels.path_fscores(paths, pred, 0.0), 1.0)
