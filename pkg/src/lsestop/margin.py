"""Margin selection: a fixed eps, or eps derived from an effective per-point
measurement count ``L``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

FIXED = "fixed"
ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class MarginPolicy:
    kind: str = ADAPTIVE
    eps: float | None = None
    L: int = 5
    delta: float = 0.99

    def __post_init__(self):
        if self.kind == FIXED:
            if self.eps is None or not self.eps > 0:
                raise ValueError("fixed margin needs eps > 0")
        elif self.kind == ADAPTIVE:
            if int(self.L) != self.L or self.L < 1:
                raise ValueError("L must be a positive integer")
            if not 0 < self.delta < 1:
                raise ValueError("delta must lie in (0, 1)")
        else:
            raise ValueError(f"unknown margin kind {self.kind!r}")

    def margin(self, k_xx, lam: float, n_candidates: int):
        if self.kind == FIXED:
            return float(self.eps)
        return adaptive_eps(k_xx, lam, self.L, self.delta, n_candidates)


def sigma_L(k_xx, lam, L):
    """Posterior standard deviation after ``L`` noisy looks at one point."""
    k_xx = np.asarray(k_xx, dtype=float)
    noise_var = 1.0 / lam
    s = np.sqrt(noise_var * k_xx / (noise_var + L * k_xx))
    return float(s) if s.ndim == 0 else s


def adaptive_eps(k_xx, lam, L, delta, n_candidates):
    if not (L >= 1 and 0 < delta < 1 and n_candidates >= 1 and lam > 0):
        raise ValueError("adaptive_eps: need L >= 1, 0 < delta < 1, n_candidates >= 1, lam > 0")
    q = -ndtri((1.0 - delta) / (2.0 * n_candidates))
    return 2.0 * sigma_L(k_xx, lam, L) * q
