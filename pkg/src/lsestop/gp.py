"""Exact Gaussian-process regression over a finite candidate set.

The kernel is the Gaussian (squared-exponential) kernel

    k(x, x') = rho * exp(-|x - x'|^2 / (2 ell^2))

with homoscedastic observation noise of precision ``lam`` and a constant
prior mean. Repeated inputs are collapsed into per-site averages before any
factorization; the resulting posterior and marginal likelihood are exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.optimize import minimize

LAMBDA_MIN = 1e-6
LAMBDA_MAX = 1e6
JITTERS = (1e-9, 1e-6, 1e-3)

LOG_2PI = math.log(2.0 * math.pi)


class NumericalSingularityError(np.linalg.LinAlgError):
    """Raised when a Gram matrix cannot be factorized even with jitter."""


class FitWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KernelHyperparams:
    rho: float
    ell: float
    lam: float

    def __post_init__(self):
        if not (self.rho > 0 and self.ell > 0 and self.lam > 0):
            raise ValueError(f"hyperparameters must be positive: {self}")

    def clamped(self) -> "KernelHyperparams":
        return KernelHyperparams(self.rho, self.ell,
                                 float(np.clip(self.lam, LAMBDA_MIN, LAMBDA_MAX)))

    def as_dict(self) -> dict:
        return {"rho": self.rho, "ell": self.ell, "lambda": self.lam}


@dataclass(frozen=True)
class MeanFunction:
    constant: float = 0.0


@dataclass
class Dataset:
    points: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.outputs = np.asarray(self.outputs, dtype=float).ravel()
        if len(self.points) != len(self.outputs):
            raise ValueError("points and outputs differ in length")
        if not np.all(np.isfinite(self.outputs)):
            raise ValueError("outputs must be finite")

    @classmethod
    def empty(cls, dim: int) -> "Dataset":
        return cls(np.empty((0, dim)), np.empty(0))

    def __len__(self):
        return len(self.outputs)

    def append(self, x, y) -> "Dataset":
        x = np.asarray(x, dtype=float).reshape(1, -1)
        pts = x if len(self) == 0 else np.vstack([self.points, x])
        return Dataset(pts, np.append(self.outputs, float(y)))


@dataclass
class PosteriorSummary:
    mu: np.ndarray
    sigma: np.ndarray


@dataclass
class JointPosterior:
    mean: np.ndarray
    covariance: np.ndarray


@dataclass
class FitResult:
    hp: KernelHyperparams
    objective: float
    init_objective: float
    warning: str | None = None
    n_success: int = 0
    history: list = field(default_factory=list, repr=False)


def _mean_value(mean) -> float:
    return float(mean.constant if isinstance(mean, MeanFunction) else mean)


def sq_dists(A, B) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    d = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.maximum(d, 0.0)


def kernel(A, B, hp: KernelHyperparams) -> np.ndarray:
    return hp.rho * np.exp(-0.5 * sq_dists(A, B) / hp.ell ** 2)


def cholesky_jitter(A: np.ndarray, n_obs: int | None = None) -> np.ndarray:
    """Lower Cholesky factor of ``A``, escalating diagonal jitter on failure."""
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        pass
    scale = float(np.mean(np.diag(A))) if A.size else 0.0
    scale = scale if scale > 0 else 1.0
    eye = np.eye(len(A))
    for j in JITTERS:
        try:
            return np.linalg.cholesky(A + j * scale * eye)
        except np.linalg.LinAlgError:
            continue
    n = len(A) if n_obs is None else n_obs
    raise NumericalSingularityError(
        f"Gram matrix for a dataset of {n} observations is numerically singular")


@dataclass
class _Collapsed:
    """Dataset with repeated inputs merged: site means, counts, within-site SS."""
    X: np.ndarray
    ybar: np.ndarray
    counts: np.ndarray
    ss_within: float
    n_total: int


def _collapse(ds: Dataset) -> _Collapsed:
    if len(ds) == 0:
        return _Collapsed(ds.points, ds.outputs, np.empty(0), 0.0, 0)
    X, inv, counts = np.unique(ds.points, axis=0, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    ybar = np.bincount(inv, weights=ds.outputs) / counts
    ss = float(((ds.outputs - ybar[inv]) ** 2).sum())
    return _Collapsed(X, ybar, counts.astype(float), ss, len(ds))


def _factor(c: _Collapsed, hp: KernelHyperparams):
    K = kernel(c.X, c.X, hp)
    K[np.diag_indices_from(K)] += 1.0 / (hp.lam * c.counts)
    return cholesky_jitter(K, c.n_total)


def _solve_parts(dataset, hp, mean, candidates):
    m = _mean_value(mean)
    C = np.atleast_2d(np.asarray(candidates, dtype=float))
    c = _collapse(dataset)
    if c.n_total == 0:
        return m, C, None, None
    Lc = _factor(c, hp)
    alpha = solve_triangular(Lc, c.ybar - m, lower=True)
    V = solve_triangular(Lc, kernel(c.X, C, hp), lower=True)
    return m, C, alpha, V


def posterior(dataset: Dataset, hp: KernelHyperparams, mean, candidates) -> PosteriorSummary:
    m, C, alpha, V = _solve_parts(dataset, hp, mean, candidates)
    if V is None:
        n = len(C)
        return PosteriorSummary(np.full(n, m), np.full(n, math.sqrt(hp.rho)))
    mu = m + V.T @ alpha
    var = hp.rho - (V * V).sum(0)
    return PosteriorSummary(mu, np.sqrt(np.maximum(var, 0.0)))


def joint_posterior(dataset: Dataset, hp: KernelHyperparams, mean, candidates) -> JointPosterior:
    m, C, alpha, V = _solve_parts(dataset, hp, mean, candidates)
    prior = kernel(C, C, hp)
    if V is None:
        return JointPosterior(np.full(len(C), m), prior)
    cov = prior - V.T @ V
    cov = 0.5 * (cov + cov.T)
    d = np.diag_indices_from(cov)
    cov[d] = np.maximum(cov[d], 0.0)
    return JointPosterior(m + V.T @ alpha, cov)


def path_factor(cov: np.ndarray) -> np.ndarray:
    """Matrix ``A`` with ``A @ A.T`` equal to ``cov`` up to a tiny relative jitter.

    Cholesky of ``cov + 1e-9 * mean(diag) * I`` first; an eigen-decomposition
    with clipped eigenvalues when that fails (including ``cov == 0``).
    """
    n = len(cov)
    scale = float(np.mean(np.diag(cov))) if n else 0.0
    if scale > 0:
        try:
            return np.linalg.cholesky(cov + 1e-9 * scale * np.eye(n))
        except np.linalg.LinAlgError:
            pass
    w, Q = np.linalg.eigh(cov)
    return Q * np.sqrt(np.maximum(w, 0.0))


def sample_paths(jp: JointPosterior, n_paths: int, seed) -> np.ndarray:
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    A = path_factor(np.asarray(jp.covariance, dtype=float))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_paths, len(jp.mean)))
    return jp.mean[None, :] + z @ A.T


# -- marginal likelihood ---------------------------------------------------

GAMMA_SHAPE = 2.0
GAMMA_SCALE = 1.0
ELL_PRIOR_SCALE = 0.2


def output_scale(dataset: Dataset, mean) -> float:
    """Mean squared deviation of outputs from the prior mean (1 if degenerate)."""
    if len(dataset) == 0:
        return 1.0
    s2 = float(np.mean((dataset.outputs - _mean_value(mean)) ** 2))
    return s2 if s2 > 0 else 1.0


def gamma_logpdf(x: float, shape: float = GAMMA_SHAPE, scale: float = GAMMA_SCALE) -> float:
    return ((shape - 1.0) * math.log(x) - x / scale
            - shape * math.log(scale) - math.lgamma(shape))


def log_prior(hp: KernelHyperparams, rho_scale: float, ell_scale: float = ELL_PRIOR_SCALE) -> float:
    # prior on rho is expressed in units of the output scale
    return (gamma_logpdf(hp.rho, scale=GAMMA_SCALE * rho_scale)
            + gamma_logpdf(hp.ell, scale=ell_scale))


def _lml_collapsed(c: _Collapsed, D: np.ndarray, hp: KernelHyperparams, m: float) -> float:
    K = hp.rho * np.exp(-0.5 * D / hp.ell ** 2)
    K[np.diag_indices_from(K)] += 1.0 / (hp.lam * c.counts)
    Lc = cholesky_jitter(K, c.n_total)
    a = solve_triangular(Lc, c.ybar - m, lower=True, check_finite=False)
    n_u = len(c.ybar)
    val = -0.5 * a @ a - np.log(np.diag(Lc)).sum() - 0.5 * n_u * LOG_2PI
    # within-site replicate terms
    val += (-0.5 * (c.n_total - n_u) * (LOG_2PI - math.log(hp.lam))
            - 0.5 * np.log(c.counts).sum() - 0.5 * hp.lam * c.ss_within)
    return float(val)


def log_marginal_likelihood(dataset: Dataset, hp: KernelHyperparams, mean,
                            priors: bool = False, ell_prior_scale: float = ELL_PRIOR_SCALE) -> float:
    """``log N(y | m, K + I/lam)``, plus gamma log-priors on rho and ell if asked."""
    if len(dataset) == 0:
        raise ValueError("log marginal likelihood needs at least one observation")
    c = _collapse(dataset)
    val = _lml_collapsed(c, sq_dists(c.X, c.X), hp, _mean_value(mean))
    if priors:
        val += log_prior(hp, output_scale(dataset, mean), ell_prior_scale)
    return val


@dataclass(frozen=True)
class Bounds:
    rho: tuple = (1e-8, 1e12)
    ell: tuple = (1e-3, 1e3)
    lam: tuple = (LAMBDA_MIN, LAMBDA_MAX)

    def log_box(self):
        return [tuple(np.log(b)) for b in (self.rho, self.ell, self.lam)]


def fit_hyperparameters(dataset: Dataset, init: KernelHyperparams, bounds: Bounds | None = None,
                        priors_enabled: bool = True, mean=0.0, *, restarts: int = 5,
                        maxiter: int = 200, tol: float = 1e-6, seed=None,
                        ell_prior_scale: float = ELL_PRIOR_SCALE) -> FitResult:
    """Maximize the (penalized) log marginal likelihood by Nelder-Mead in log space.

    The first start is ``init``; the remaining ``restarts - 1`` are random.
    Never returns a point worse than ``init``.
    """
    bounds = bounds or Bounds()
    box = bounds.log_box()
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    # clamp in linear space so an in-range init comes back bit-identical
    init = KernelHyperparams(*(float(np.clip(v, math.exp(a), math.exp(b)))
                               for v, (a, b) in zip((init.rho, init.ell, init.lam), box)))
    z0 = np.log([init.rho, init.ell, init.lam])

    if len(dataset) < 2:
        return FitResult(init, math.nan, math.nan)

    m = _mean_value(mean)
    c = _collapse(dataset)
    D = sq_dists(c.X, c.X)
    rho_scale = output_scale(dataset, m)

    def objective(z):
        z = np.clip(z, lo, hi)
        hp = KernelHyperparams(*np.exp(z))
        try:
            val = _lml_collapsed(c, D, hp, m)
        except np.linalg.LinAlgError:
            return math.inf
        if priors_enabled:
            val += log_prior(hp, rho_scale, ell_prior_scale)
        return -val if math.isfinite(val) else math.inf

    f0 = objective(z0)
    rng = np.random.default_rng(seed)
    starts = [z0]
    log_s2 = math.log(rho_scale)
    for _ in range(max(restarts, 1) - 1):
        starts.append(np.clip([
            log_s2 + rng.uniform(-2.0, 2.0),
            rng.uniform(math.log(0.05), math.log(1.0)),
            -log_s2 + rng.uniform(0.0, 12.0),
        ], lo, hi))

    best_z, best_f, n_ok = z0, f0, 0
    history = []
    for z in starts:
        try:
            res = minimize(objective, z, method="Nelder-Mead", bounds=list(zip(lo, hi)),
                           options={"maxiter": maxiter, "fatol": tol, "xatol": 1e-4})
        except (ValueError, FloatingPointError):
            continue
        history.append(float(res.fun))
        if not math.isfinite(res.fun):
            continue
        n_ok += 1
        if res.fun < best_f:
            best_z, best_f = np.clip(res.x, lo, hi), float(res.fun)

    warning = None
    if n_ok == 0:
        warning = "all optimizer restarts failed; keeping initial hyperparameters"
        warnings.warn(warning, FitWarning, stacklevel=2)
    return FitResult(KernelHyperparams(*np.exp(best_z)), -best_f, -f0, warning, n_ok, history)
