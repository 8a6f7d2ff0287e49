"""Partition candidates into estimated upper, lower and undetermined sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .kernels import LABEL_LOWER, LABEL_UNDETERMINED, LABEL_UPPER
from .probabilities import TriProbability, class_probs

BETA_CAP = float(-ndtri(1e-16))  # ~8.22


@dataclass(frozen=True)
class ClassificationTriplet:
    upper: frozenset
    lower: frozenset
    undetermined: frozenset

    @classmethod
    def from_labels(cls, labels) -> "ClassificationTriplet":
        labels = np.asarray(labels)
        return cls(*(frozenset(np.flatnonzero(labels == k).tolist())
                     for k in (LABEL_UPPER, LABEL_LOWER, LABEL_UNDETERMINED)))

    def labels(self, n: int) -> np.ndarray:
        lab = np.full(n, -1, dtype=np.int8)
        for k, idx in ((LABEL_UPPER, self.upper), (LABEL_LOWER, self.lower),
                       (LABEL_UNDETERMINED, self.undetermined)):
            lab[list(idx)] = k
        if (lab < 0).any():
            raise ValueError("triplet does not cover all candidates")
        return lab

    @property
    def n(self) -> int:
        return len(self.upper) + len(self.lower) + len(self.undetermined)

    def sizes(self):
        return len(self.upper), len(self.lower), len(self.undetermined)


def proposed_labels(tps: TriProbability) -> np.ndarray:
    """Label array for the max-probability rule; ties go upper, then lower."""
    p_h, p_l, p_u = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (tps.p_h, tps.p_l, tps.p_u))
    up = (p_h >= p_l) & (p_h >= p_u)
    lo = ~up & (p_l >= p_u)
    return np.where(up, LABEL_UPPER, np.where(lo, LABEL_LOWER, LABEL_UNDETERMINED)).astype(np.int8)


def classify_proposed(tps: TriProbability) -> ClassificationTriplet:
    return ClassificationTriplet.from_labels(proposed_labels(tps))


def standard_labels(mu, sigma, theta: float, beta: float) -> np.ndarray:
    if not beta > 0:
        raise ValueError("beta must be positive")
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    up = mu - beta * sigma > theta
    lo = mu + beta * sigma < theta
    return np.where(up, LABEL_UPPER, np.where(lo, LABEL_LOWER, LABEL_UNDETERMINED)).astype(np.int8)


def classify_standard(mu, sigma, theta: float, beta: float) -> ClassificationTriplet:
    return ClassificationTriplet.from_labels(standard_labels(mu, sigma, theta, beta))


def eps_to_beta(mu, sigma, theta, eps) -> float:
    """Confidence width ``beta`` equivalent to margin ``eps`` at one candidate."""
    if not (sigma > 0 and eps > 0):
        raise ValueError("eps_to_beta needs sigma > 0 and eps > 0")
    tp = class_probs(mu, sigma, theta, eps)
    # Phi^{-1}(p_u) = -Phi^{-1}(1 - p_u), the latter is accurate near p_u -> 1
    return float(min(-ndtri(tp.p_not_u), BETA_CAP))


def beta_to_eps(mu, sigma, theta, beta, *, max_iter: int = 400) -> float:
    """Margin ``eps`` whose in-margin probability equals ``Phi(beta)``.

    Solved by bisection on ``Pr(not in margin) = Phi(-beta)``, which is
    monotone decreasing in ``eps``.
    """
    if not sigma > 0:
        raise ValueError("beta_to_eps needs sigma > 0")
    target = float(ndtr(-beta))  # required Pr(not in margin)
    if float(ndtr(beta)) >= 1.0:
        raise ValueError(f"Phi(beta) is numerically 1 for beta={beta}; margin unattainable")
    if target >= 1.0:
        return 0.0

    def p_out(e):
        if e <= 0:
            return 1.0
        return float(class_probs(mu, sigma, theta, e).p_not_u)

    lo, hi = 0.0, 2.0 * (abs(theta - mu) + 10.0 * sigma)
    while p_out(hi) > target:
        hi *= 2.0
        if not np.isfinite(hi):
            raise ValueError("could not bracket the margin")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if p_out(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
