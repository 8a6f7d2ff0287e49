"""Stopping rules evaluated once per iteration.

* proposed: stop once ``1 - sum(r_min) >= delta``; by construction the
  current triplet is then eps-accurate with probability at least ``delta``.
* fc: stop once the confidence-interval rule leaves nothing undetermined.
* fs: stop once a low percentile of posterior-sampled F-scores clears a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import kernels
from .classification import ClassificationTriplet
from .gp import JointPosterior, sample_paths
from .probabilities import TriProbability


@dataclass
class StoppingReport:
    proposed_bound: float
    proposed_stop: bool
    fc_stop: bool
    fs_percentile: float | None = None
    fs_stop: bool = False


def accuracy_bound(tps: TriProbability) -> float:
    """Lower bound ``1 - sum(r_min)`` on the probability of eps-accuracy."""
    return float(1.0 - np.sum(tps.r_min))


def standard_rule_bound(tps: TriProbability, beta: float) -> float:
    """Same bound for the confidence-interval rule, where the in-margin
    probability is replaced by ``Phi(beta)`` at every candidate."""
    r = np.minimum(tps.p_min, float(ndtr(-beta)))
    return float(1.0 - np.sum(r))


def check_proposed(tps: TriProbability, delta: float):
    bound = accuracy_bound(tps)
    return bound >= delta, bound


def check_fc(triplet: ClassificationTriplet) -> bool:
    return len(triplet.undetermined) == 0


def nearest_rank(values, pct: float) -> float:
    """Nearest-rank ``pct``-th percentile (0 < pct <= 100)."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("no values")
    k = max(int(math.ceil(pct / 100.0 * v.size)), 1)
    return float(v[k - 1])


def check_fs(jp: JointPosterior, prediction_upper, theta: float, target_f: float = 0.95,
             percentile: float = 95.0, n_samples: int = 1000, seed=None):
    """Stop when the ``(100 - percentile)``-th percentile of sampled F-scores
    reaches ``target_f``. Returns ``(stop, percentile_value)``."""
    if n_samples < 100:
        raise ValueError("check_fs needs at least 100 samples")
    n = len(jp.mean)
    pred = np.zeros(n, dtype=bool)
    pred[list(prediction_upper)] = True
    paths = sample_paths(jp, n_samples, seed)
    scores = kernels.path_fscores(paths, pred, theta)
    value = nearest_rank(scores, 100.0 - percentile)
    return value >= target_f, value
