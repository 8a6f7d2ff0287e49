import math

import numpy as np
import pytest

from lsestop import bench
from lsestop.bench import BenchmarkSpec, DomainError


def test_known_values():
    assert bench.eval_true(BenchmarkSpec("sphere"), [0.0, 0.0]) == 0.0
    assert bench.eval_true(BenchmarkSpec("rosenbrock"), [1.0, 1.0]) == 0.0
    assert bench.eval_true(BenchmarkSpec("branin"), [math.pi, 2.275]) == pytest.approx(0.397887, abs=1e-4)
    assert bench.eval_true(BenchmarkSpec("booth"), [1.0, 3.0]) == 0.0
    assert bench.eval_true(BenchmarkSpec("cross_in_tray"), [1.3491, 1.3491]) == pytest.approx(-2.06261, abs=1e-4)
    assert bench.eval_true(BenchmarkSpec("holder_table"), [8.05502, 9.66459]) == pytest.approx(-19.2085, abs=1e-4)


def test_out_of_domain():
    with pytest.raises(DomainError):
        bench.eval_true(BenchmarkSpec("branin"), [-6.0, 0.0])


def test_grid():
    g = bench.make_grid(BenchmarkSpec("sphere", resolution=20))
    assert g.shape == (400, 2)
    assert bench.make_grid(BenchmarkSpec("sphere", resolution=30)).shape == (900, 2)
    corners = bench.make_grid(BenchmarkSpec("sphere", resolution=2, bounds=[[0, 1], [0, 1]]))
    np.testing.assert_array_equal(corners, [[0, 0], [0, 1], [1, 0], [1, 1]])
    np.testing.assert_array_equal(g, bench.make_grid(BenchmarkSpec("sphere")))


def test_defaults_and_validation():
    s = BenchmarkSpec("rosenbrock")
    assert (s.theta, s.noise_std) == (100.0, 30.0)
    assert BenchmarkSpec("sphere").noise_std == 2.0
    for kw in (dict(function="nope"), dict(function="sphere", resolution=1),
               dict(function="sphere", bounds=[[1, 0], [0, 1]]), dict(function="sphere", noise_std=-1)):
        with pytest.raises(ValueError):
            BenchmarkSpec(**kw)


def test_observe_noise():
    s = BenchmarkSpec("branin")
    x = [1.0, 2.0]
    assert bench.observe(s.with_(noise_std=0.0), x, np.random.default_rng(0)) == bench.eval_true(s, x)
    rng = np.random.default_rng(1)
    ys = np.array([bench.observe(s, x, rng) for _ in range(10_000)])
    assert abs(ys.std() / 20.0 - 1) < 0.05
    assert bench.observe(s, x, np.random.default_rng(5)) == bench.observe(s, x, np.random.default_rng(5))


def test_normalize():
    s = BenchmarkSpec("branin")
    u = bench.normalize(s, bench.make_grid(s))
    assert u.min() == 0.0 and u.max() == 1.0
