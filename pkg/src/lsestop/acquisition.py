"""Acquisition scores and next-point selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .probabilities import TriProbability

PROPOSED = "proposed"
MISCLASS = "misclass"
STRADDLE = "straddle"
US = "us"
KINDS = (PROPOSED, MISCLASS, STRADDLE, US)


class CandidatesExhausted(RuntimeError):
    """No eligible candidate left (every point visited and repeats disallowed)."""


@dataclass(frozen=True)
class AcquisitionPolicy:
    kind: str = PROPOSED
    beta: float = 1.96
    allow_repeats: bool = True
    # extension hook: score(tp, mu, sigma, theta) -> array
    custom: Callable | None = None

    def __post_init__(self):
        if self.custom is None and self.kind not in KINDS:
            raise ValueError(f"unknown acquisition kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == STRADDLE and not self.beta > 0:
            raise ValueError("straddle beta must be positive")

    @property
    def uses_proposed_rule(self) -> bool:
        return self.kind == PROPOSED and self.custom is None


def score(policy: AcquisitionPolicy, tp: TriProbability, mu, sigma, theta: float):
    if policy.custom is not None:
        return policy.custom(tp, mu, sigma, theta)
    if policy.kind == PROPOSED:
        return tp.r_min
    if policy.kind == MISCLASS:
        return tp.p_min
    if policy.kind == US:
        return np.asarray(sigma, dtype=float) * 1.0
    return policy.beta * np.asarray(sigma, dtype=float) - np.abs(np.asarray(mu, dtype=float) - theta)


def select_next(policy: AcquisitionPolicy, scores, history=()) -> int:
    """Index of the highest score among eligible candidates; lowest index wins ties."""
    s = np.array(scores, dtype=float, ndmin=1)
    if not policy.allow_repeats and len(history):
        s[np.fromiter(history, dtype=int)] = -np.inf
        if np.all(np.isneginf(s)):
            raise CandidatesExhausted("all candidates already observed and repeats are disabled")
    if s.size == 0:
        raise CandidatesExhausted("empty candidate set")
    return int(np.argmax(s))
