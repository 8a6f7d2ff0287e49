"""Class-membership probabilities under a Gaussian posterior.

For a candidate with posterior ``N(mu, sigma^2)``, threshold ``theta`` and
margin ``eps`` the three events are

    upper:        f > theta
    lower:        f <= theta
    in-margin:    -eps/2 < f - theta <= eps/2

Every function here accepts scalars or equal-length arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import kernels


@dataclass(frozen=True)
class TriProbability:
    p_h: np.ndarray
    p_l: np.ndarray
    p_u: np.ndarray
    p_not_u: np.ndarray

    @property
    def p_min(self):
        return np.minimum(self.p_h, self.p_l)

    @property
    def p_max(self):
        return np.maximum(self.p_h, self.p_l)

    @property
    def r_min(self):
        return np.minimum(self.p_min, self.p_not_u)

    @property
    def r_max(self):
        return np.maximum(self.p_max, self.p_u)

    def __len__(self):
        return np.size(self.p_h)

    def __getitem__(self, i) -> "TriProbability":
        return TriProbability(self.p_h[i], self.p_l[i], self.p_u[i], self.p_not_u[i])

    @classmethod
    def from_components(cls, p_h, p_u) -> "TriProbability":
        """Build from ``Pr(upper)`` and ``Pr(in margin)`` directly."""
        p_h = np.asarray(p_h, dtype=float)
        p_u = np.asarray(p_u, dtype=float)
        return cls(p_h, 1.0 - p_h, p_u, 1.0 - p_u)


@dataclass(frozen=True)
class FourBin:
    """Joint law of (upper?, in-margin?): p00 below the margin, p01 lower half
    of the margin, p11 upper half of the margin, p10 above the margin."""
    p00: np.ndarray
    p01: np.ndarray
    p11: np.ndarray
    p10: np.ndarray


def class_probs(mu, sigma, theta: float, eps) -> TriProbability:
    eps_arr = np.asarray(eps, dtype=float)
    if np.any(eps_arr <= 0):
        raise ValueError("margin eps must be positive")
    p_h, p_l, p_u, p_not_u = kernels.tri_probs(mu, sigma, float(theta), eps_arr)
    if np.ndim(mu) == 0 and np.ndim(sigma) == 0 and eps_arr.ndim == 0:
        p_h, p_l, p_u, p_not_u = (float(v) for v in (p_h, p_l, p_u, p_not_u))
    return TriProbability(p_h, p_l, p_u, p_not_u)


def _ordered_diff(a, b):
    """``Phi(b) - Phi(a)`` for ``a <= b`` evaluated on the accurate side."""
    return np.where(a >= 0, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))


def four_bin(mu, sigma, theta: float, eps) -> FourBin:
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise ValueError("margin eps must be positive")
    gap = mu - theta
    pos = sigma > 0
    s = np.where(pos, sigma, 1.0)
    # tiny sigma overflows to +-inf, where the CDF is still exact
    with np.errstate(over="ignore"):
        a = (-0.5 * eps - gap) / s
        c = -gap / s
        b = (0.5 * eps - gap) / s
    p00 = np.where(pos, ndtr(a), (gap <= -0.5 * eps).astype(float))
    p01 = np.where(pos, _ordered_diff(a, c), ((gap > -0.5 * eps) & (gap <= 0)).astype(float))
    p11 = np.where(pos, _ordered_diff(c, b), ((gap > 0) & (gap <= 0.5 * eps)).astype(float))
    p10 = np.where(pos, ndtr(-b), (gap > 0.5 * eps).astype(float))
    out = [p00, p01, p11, p10]
    if all(np.ndim(v) == 0 for v in out):
        out = [float(v) for v in out]
    return FourBin(*out)


def gamma_eta(tp: TriProbability, tweak: bool = False):
    """Per-candidate ``(gamma, eta)`` pair used in the accuracy-probability bound.

    ``gamma = max(p_min, p_u)`` and ``eta = 1`` iff ``p_u > p_max``. With
    ``tweak=True``, ``gamma = max((p_min + p_max) / 2, p_u)``; this avoids
    equality tests on floating-point probabilities when checking paths.
    """
    p_min, p_max = tp.p_min, tp.p_max
    base = 0.5 * (p_min + p_max) if tweak else p_min
    gamma = np.maximum(base, tp.p_u)
    eta = (np.asarray(tp.p_u) - p_max > 0).astype(int)
    if np.ndim(gamma) == 0:
        return float(gamma), int(eta)
    return gamma, eta
