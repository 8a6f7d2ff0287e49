"""Monte-Carlo check of the eps-accuracy probability bound.

Sample paths from the joint posterior stand in for the unknown function; the
fraction of paths on which the current triplet is eps-accurate estimates the
probability that the bound ``1 - sum(r_min)`` claims to lower-bound.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .classification import ClassificationTriplet
from .gp import JointPosterior, path_factor
from .probabilities import TriProbability

DEFAULT_PATHS = 10_000


def empirical_eps_accuracy_prob(jp: JointPosterior, triplet: ClassificationTriplet, theta: float,
                                eps, n_paths: int = DEFAULT_PATHS, seed=None,
                                batch: int = 2000):
    """Returns ``(estimate, stderr)``.

    Paths are drawn in batches from one generator, so the estimate does not
    depend on ``batch``.
    """
    if n_paths < 100:
        raise ValueError("need at least 100 sample paths")
    n = len(jp.mean)
    labels = triplet.labels(n)
    half = np.broadcast_to(0.5 * np.asarray(eps, dtype=float), (n,))
    A = path_factor(np.asarray(jp.covariance, dtype=float))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < n_paths:
        b = min(batch, n_paths - done)
        z = rng.standard_normal((b, n))
        paths = jp.mean[None, :] + z @ A.T
        hits += kernels.count_eps_accurate(paths, labels, theta, half)
        done += b
    est = hits / n_paths
    return est, math.sqrt(est * (1.0 - est) / n_paths)


def bound_gap(estimate: float, tps: TriProbability) -> float:
    return float(estimate - (1.0 - np.sum(tps.r_min)))
