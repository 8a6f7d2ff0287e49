import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from lsestop.classification import (
    BETA_CAP, ClassificationTriplet, beta_to_eps, classify_proposed, classify_standard,
    eps_to_beta, proposed_labels, standard_labels,
)
from lsestop.probabilities import TriProbability, class_probs


def tri(p_h, p_u):
    return TriProbability.from_components([p_h], [p_u])


@pytest.mark.parametrize("p_h,p_u,which", [(0.7, 0.2, "upper"), (0.5, 0.2, "upper")])
def test_proposed_examples(p_h, p_u, which):
    assert getattr(classify_proposed(tri(p_h, p_u)), which) == {0}


def test_proposed_undetermined():
    tp = TriProbability(np.array([0.3]), np.array([0.3]), np.array([0.4]), np.array([0.6]))
    assert classify_proposed(tp).undetermined == {0}


def test_standard_examples():
    assert classify_standard([3.0], [1.0], 0.0, 1.96).upper == {0}
    assert classify_standard([0.0], [1.0], 0.0, 1.96).undetermined == {0}
    assert classify_standard([0.0], [0.0], 0.0, 1.96).undetermined == {0}
    assert classify_standard([-3.0], [1.0], 0.0, 1.96).lower == {0}


def test_triplet_partition():
    rng = np.random.default_rng(0)
    mu, sigma = rng.normal(size=500), rng.random(500)
    for t in (classify_standard(mu, sigma, 0, 1.0), classify_proposed(class_probs(mu, sigma, 0, 0.5))):
        assert not (t.upper & t.lower or t.upper & t.undetermined or t.lower & t.undetermined)
        assert t.upper | t.lower | t.undetermined == set(range(500))
        np.testing.assert_array_equal(ClassificationTriplet.from_labels(t.labels(500)).labels(500), t.labels(500))


def test_eps_to_beta_example():
    assert eps_to_beta(0.0, 1.0, 0.0, 2.0) == pytest.approx(norm.ppf(2 * norm.cdf(1) - 1), abs=1e-12)
    # quoted elsewhere as 0.47500; the quantile is 0.475233
    assert eps_to_beta(0.0, 1.0, 0.0, 2.0) == pytest.approx(0.475233, abs=1e-6)


def test_eps_to_beta_cap():
    assert eps_to_beta(0.0, 1.0, 0.0, 1e6) == BETA_CAP
    assert BETA_CAP == pytest.approx(8.2, abs=0.05)


def test_beta_to_eps_examples():
    target_beta = norm.ppf(2 * norm.cdf(1) - 1)
    assert beta_to_eps(0.0, 1.0, 0.0, target_beta) == pytest.approx(2.0, abs=1e-9)
    assert beta_to_eps(0.0, 1.0, 0.0, -40.0) < 1e-8
    with pytest.raises(ValueError):
        beta_to_eps(0.0, 1.0, 0.0, 40.0)


def test_beta_to_eps_monotone():
    eps = [beta_to_eps(0.3, 0.8, 0.0, b) for b in np.linspace(0.1, 5, 30)]
    assert np.all(np.diff(eps) > 0)


def test_beta_to_eps_residual():
    for mu, b in [(0.0, 1.0), (2.5, 0.3), (-7.0, 3.0)]:
        e = beta_to_eps(mu, 1.5, 0.0, b)
        assert abs(class_probs(mu, 1.5, 0.0, e).p_u - norm.cdf(b)) <= 1e-10


@settings(max_examples=300, deadline=None)
@given(mu=st.floats(-20, 20), sigma=st.floats(1e-3, 10), theta=st.floats(-20, 20),
       beta=st.floats(0.1, 5))
def test_roundtrip_property(mu, sigma, theta, beta):
    eps = beta_to_eps(mu, sigma, theta, beta)
    assert eps_to_beta(mu, sigma, theta, eps) == pytest.approx(beta, abs=1e-8)


def test_equivalence_with_constant_margin_probability():
    rng = np.random.default_rng(3)
    n = 10_000
    mu, sigma = rng.normal(scale=3, size=n), rng.exponential(size=n) + 1e-3
    beta = 1.96
    tp = class_probs(mu, sigma, 0.0, 1.0)
    const = TriProbability(tp.p_h, tp.p_l, np.full(n, norm.cdf(beta)), np.full(n, norm.sf(beta)))
    gap = np.abs(np.abs(mu) - beta * sigma)
    keep = gap > 1e-9 * np.maximum(1, np.abs(mu))
    np.testing.assert_array_equal(proposed_labels(const)[keep],
                                  standard_labels(mu, sigma, 0.0, beta)[keep])
