"""Classification quality: F-score against ground truth, eps-accuracy, and
closed-form metric lower bounds implied by an eps-accurate triplet.

The upper level set is the positive class throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classification import ClassificationTriplet


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @classmethod
    def from_sets(cls, pred_upper, true_upper, n: int) -> "ConfusionCounts":
        pred, true = set(pred_upper), set(true_upper)
        tp = len(pred & true)
        fp = len(pred - true)
        fn = len(true - pred)
        return cls(tp, n - tp - fp - fn, fp, fn)

    @property
    def f_score(self) -> float:
        return _ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn)

    @property
    def accuracy(self) -> float:
        return _ratio(self.tp + self.tn, self.tp + self.tn + self.fp + self.fn)

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def specificity(self) -> float:
        return _ratio(self.tn, self.tn + self.fp)


@dataclass(frozen=True)
class MetricBounds:
    accuracy_lb: float
    precision_lb: float
    recall_lb: float
    specificity_lb: float
    f_score_lb: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _ratio(num, den) -> float:
    # 0/0 is taken as vacuously perfect
    return 1.0 if den == 0 else num / den


def evaluation_prediction(mu, theta: float, triplet: ClassificationTriplet | None = None) -> frozenset:
    """Upper set used for scoring: classified points keep their class and
    undetermined points go by the posterior mean. Without a triplet every
    point goes by the posterior mean."""
    mu = np.asarray(mu, dtype=float)
    if triplet is None:
        return frozenset(np.flatnonzero(mu > theta).tolist())
    und = np.fromiter(triplet.undetermined, dtype=int)
    by_mean = und[mu[und] > theta] if und.size else und
    return frozenset(triplet.upper) | frozenset(by_mean.tolist())


def true_upper(f_true, theta: float) -> frozenset:
    return frozenset(np.flatnonzero(np.asarray(f_true) > theta).tolist())


def f_score(pred_upper, true_upper, n: int) -> float:
    return ConfusionCounts.from_sets(pred_upper, true_upper, n).f_score


def eps_accuracy(triplet: ClassificationTriplet, f_true, theta: float, eps) -> bool:
    f = np.asarray(f_true, dtype=float)
    gap = f - theta
    half = np.broadcast_to(0.5 * np.asarray(eps, dtype=float), f.shape)
    up = np.fromiter(triplet.upper, dtype=int)
    lo = np.fromiter(triplet.lower, dtype=int)
    un = np.fromiter(triplet.undetermined, dtype=int)
    return bool(np.all(gap[up] > 0) and np.all(gap[lo] <= 0)
                and np.all((gap[un] > -half[un]) & (gap[un] <= half[un])))


def metric_lower_bounds(triplet: ClassificationTriplet) -> MetricBounds:
    h, l, u = triplet.sizes()
    return MetricBounds(
        accuracy_lb=_ratio(h + l, h + l + u),
        precision_lb=_ratio(h, h + u),
        recall_lb=_ratio(h, h + u),
        specificity_lb=_ratio(l, l + u),
        f_score_lb=_ratio(2 * h, 2 * h + u),
    )
