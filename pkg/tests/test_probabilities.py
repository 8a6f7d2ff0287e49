import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsestop.probabilities import TriProbability, class_probs, four_bin, gamma_eta

mpmath.mp.dps = 50


def mp_phi(z):
    return mpmath.ncdf(mpmath.mpf(z))


def oracle(mu, sigma, theta, eps):
    a = (theta - eps / 2 - mu) / sigma
    c = (theta - mu) / sigma
    b = (theta + eps / 2 - mu) / sigma
    p_u = mp_phi(b) - mp_phi(a)
    return float(mp_phi(-c)), float(mp_phi(c)), float(p_u), float(mp_phi(a) + mp_phi(-b))


def test_center_halves():
    tp = class_probs(3.0, 1.0, 3.0, 0.7)
    assert tp.p_l == 0.5 and tp.p_h == 0.5


def test_margin_two_sigma():
    tp = class_probs(0.0, 1.0, 0.0, 2.0)
    assert tp.p_u == pytest.approx(0.682689, abs=1e-6)
    assert tp.p_u == pytest.approx(float(2 * mp_phi(1) - 1), abs=1e-15)


def test_degenerate_sigma_zero():
    tp = class_probs(1.0, 0.0, 0.0, 1.0)
    assert (tp.p_h, tp.p_l, tp.p_u) == (1.0, 0.0, 0.0)
    # right-closed margin
    assert class_probs(0.5, 0.0, 0.0, 1.0).p_u == 1.0
    assert class_probs(-0.5, 0.0, 0.0, 1.0).p_u == 0.0
    assert class_probs(0.0, 0.0, 0.0, 1.0).p_l == 1.0


def test_eps_must_be_positive():
    with pytest.raises(ValueError):
        class_probs(0.0, 1.0, 0.0, 0.0)


@pytest.mark.parametrize("mu,sigma,theta,eps", [
    (0.0, 1.0, 0.0, 2.0), (5.0, 0.3, 1.0, 0.1), (-40.0, 2.0, 0.0, 3.0),
    (1e-3, 1e-4, 0.0, 1e-3), (10.0, 1.0, 0.0, 25.0), (0.2, 5.0, 0.0, 1e-6),
])
def test_matches_mpmath(mu, sigma, theta, eps):
    got = class_probs(mu, sigma, theta, eps)
    ref = oracle(mu, sigma, theta, eps)
    # tails to full relative precision; a CDF difference inside the bulk
    # cancels, so absolute error there is the meaningful scale
    for g, r in zip((got.p_h, got.p_l, got.p_u, got.p_not_u), ref):
        assert g == pytest.approx(r, rel=1e-12, abs=1e-15)


def test_far_tail_r_min_is_accurate():
    # tiny probabilities drive the stopping sum; they must not collapse to 0 or 1 - 1
    tp = class_probs(9.0, 1.0, 0.0, 1.0)
    assert tp.p_l == pytest.approx(float(mp_phi(-9)), rel=1e-12)
    assert tp.r_min == pytest.approx(float(mp_phi(-9)), rel=1e-12)


def test_four_bin_example():
    fb = four_bin(0.0, 1.0, 0.0, 2.0)
    assert fb.p00 == pytest.approx(0.158655, abs=1e-6)
    assert fb.p01 == pytest.approx(0.341345, abs=1e-6)
    assert fb.p11 == pytest.approx(0.341345, abs=1e-6)
    assert fb.p10 == pytest.approx(0.158655, abs=1e-6)


def test_four_bin_zero_width():
    fb = four_bin(0.3, 1.0, 0.0, 1e-300)
    assert fb.p01 == pytest.approx(0.0, abs=1e-250)
    assert fb.p11 == pytest.approx(0.0, abs=1e-250)


def test_four_bin_degenerate():
    fb = four_bin([-2.0, -0.2, 0.0, 0.3, 2.0], 0.0, 0.0, 1.0)
    np.testing.assert_array_equal(fb.p00, [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(fb.p01, [0, 1, 1, 0, 0])
    np.testing.assert_array_equal(fb.p11, [0, 0, 0, 1, 0])
    np.testing.assert_array_equal(fb.p10, [0, 0, 0, 0, 1])


def test_gamma_eta_examples():
    tp = TriProbability(0.2, 0.8, 0.3, 0.7)
    assert gamma_eta(tp) == (0.3, 0)
    assert gamma_eta(tp, tweak=True) == (0.5, 0)
    assert gamma_eta(TriProbability(0.4, 0.6, 0.9, 0.1))[1] == 1


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(mu=finite, sigma=st.floats(0, 1e3), theta=finite, eps=st.floats(1e-6, 1e3))
def test_invariants_property(mu, sigma, theta, eps):
    tp = class_probs(mu, sigma, theta, eps)
    fb = four_bin(mu, sigma, theta, eps)
    vals = [tp.p_h, tp.p_l, tp.p_u, tp.p_not_u, fb.p00, fb.p01, fb.p11, fb.p10]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert abs(tp.p_h + tp.p_l - 1) <= 1e-12
    assert abs(tp.p_u + tp.p_not_u - 1) <= 1e-12
    assert abs(fb.p00 + fb.p01 + fb.p11 + fb.p10 - 1) <= 1e-12
    assert abs(fb.p00 + fb.p01 - tp.p_l) <= 1e-12
    assert abs(fb.p10 + fb.p11 - tp.p_h) <= 1e-12
    assert abs(fb.p01 + fb.p11 - tp.p_u) <= 1e-12
    assert tp.r_min <= 0.5


@settings(max_examples=200, deadline=None)
@given(d=st.floats(-50, 50), sigma=st.floats(1e-3, 50), eps=st.floats(1e-3, 50))
def test_symmetry_property(d, sigma, eps):
    a = class_probs(d, sigma, 0.0, eps)
    b = class_probs(-d, sigma, 0.0, eps)
    assert a.p_h == pytest.approx(b.p_l, abs=1e-15)
    # the margin is half-open, but for sigma > 0 the endpoint has measure zero
    assert a.p_u == pytest.approx(b.p_u, abs=1e-14)


def test_p_u_strictly_increasing_in_eps():
    eps = np.geomspace(1e-3, 10.0, 200)
    p_u = class_probs(np.full(200, 0.4), np.ones(200), 0.0, eps).p_u
    assert np.all(np.diff(p_u) > 0)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(0)
    mu, sigma = rng.normal(size=20), rng.random(20)
    tp = class_probs(mu, sigma, 0.1, 0.5)
    for i in range(20):
        s = class_probs(mu[i], sigma[i], 0.1, 0.5)
        assert tp.p_u[i] == s.p_u and tp.p_h[i] == s.p_h
