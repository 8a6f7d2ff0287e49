import itertools

import numpy as np
import pytest
from scipy.stats import multivariate_normal, norm

from lsestop.classification import ClassificationTriplet, classify_proposed
from lsestop.gp import JointPosterior
from lsestop.probabilities import class_probs
from lsestop.verify import bound_gap, empirical_eps_accuracy_prob


def T(h, l, u):
    return ClassificationTriplet(frozenset(h), frozenset(l), frozenset(u))


def test_degenerate_paths():
    jp = JointPosterior(np.array([1.0, -1.0, 0.1]), np.zeros((3, 3)))
    est, se = empirical_eps_accuracy_prob(jp, T({0}, {1}, {2}), 0.0, 1.0, 1000, seed=0)
    assert (est, se) == (1.0, 0.0)
    est, _ = empirical_eps_accuracy_prob(jp, T({1}, {0}, {2}), 0.0, 1.0, 1000, seed=0)
    assert est == 0.0


def test_single_candidate_closed_form():
    jp = JointPosterior(np.array([1.0]), np.ones((1, 1)))
    est, se = empirical_eps_accuracy_prob(jp, T({0}, (), ()), 0.0, 1.0, 10_000, seed=3)
    assert abs(est - norm.cdf(1)) <= 3 * se
    tp = class_probs(1.0, 1.0, 0.0, 1.0)
    assert abs(bound_gap(est, tp) - (est - (1 - tp.r_min))) < 1e-15
    assert abs(bound_gap(est, tp)) <= 3 * se + 1e-12  # H-tilde: bound is exact


def test_batch_partition_independent():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 6))
    jp = JointPosterior(rng.normal(size=6), A @ A.T / 6)
    tri = classify_proposed(class_probs(jp.mean, np.sqrt(np.diag(jp.covariance)), 0.0, 1.0))
    runs = {empirical_eps_accuracy_prob(jp, tri, 0.0, 1.0, 5000, seed=9, batch=b) for b in (7, 500, 5000)}
    assert len(runs) == 1


def test_gap_examples():
    from lsestop.probabilities import TriProbability
    tp = TriProbability(np.array([0.005, 0.995]), np.array([0.995, 0.005]),
                        np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    assert bound_gap(1.0, tp) == pytest.approx(0.01)
    big = TriProbability(np.full(10, 0.4), np.full(10, 0.6), np.zeros(10), np.ones(10))
    assert bound_gap(0.0, big) > 0


def test_three_candidate_quadrature_oracle():
    """Exact probability of the eps-accuracy event for |X| = 3 via the
    multivariate normal CDF over the product box."""
    cov = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.4], [0.2, 0.4, 1.0]])
    mean = np.array([0.8, -0.6, 0.1])
    jp = JointPosterior(mean, cov)
    eps = 1.5
    tri = T({0}, {1}, {2})
    est, se = empirical_eps_accuracy_prob(jp, tri, 0.0, eps, 20_000, seed=4)
    lo = np.array([0.0, -np.inf, -eps / 2])
    hi = np.array([np.inf, 0.0, eps / 2])
    # inclusion-exclusion over box corners
    mvn = multivariate_normal(mean, cov)
    exact = 0.0
    for corner in itertools.product((0, 1), repeat=3):
        pt = np.where(np.array(corner) == 1, hi, lo)
        if np.any(np.isneginf(pt)):
            continue
        pt = np.where(np.isposinf(pt), 50.0, pt)
        exact += (-1) ** (3 - sum(corner)) * mvn.cdf(pt)
    assert abs(est - exact) <= 3 * se + 2e-3


def test_needs_paths():
    jp = JointPosterior(np.zeros(1), np.ones((1, 1)))
    with pytest.raises(ValueError):
        empirical_eps_accuracy_prob(jp, T({0}, (), ()), 0.0, 1.0, 10)
