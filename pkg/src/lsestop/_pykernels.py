"""Pure numpy versions of the per-candidate and per-path kernels.

These are the reference implementations; ``_speedups`` (Cython) must agree
with them. Selection between the two happens in :mod:`lsestop.kernels`.
"""

import numpy as np
from scipy.special import ndtr

H, L, U = 0, 1, 2


def tri_probs(mu, sigma, theta, eps):
    """Return ``(p_h, p_l, p_u, p_not_u)`` as float arrays.

    ``eps`` may be a scalar or per-candidate array. Zero ``sigma`` is treated
    as a point mass at ``mu``.
    """
    mu, sigma, eps = np.broadcast_arrays(
        np.asarray(mu, dtype=float), np.asarray(sigma, dtype=float),
        np.asarray(eps, dtype=float))
    gap = mu - theta
    pos = sigma > 0
    s = np.where(pos, sigma, 1.0)

    with np.errstate(over="ignore"):
        z = gap / s
        # margin edges in standard units
        a = (-0.5 * eps - gap) / s
        b = (0.5 * eps - gap) / s
    p_h = ndtr(z)
    p_l = ndtr(-z)
    # evaluate the difference on whichever side of the normal keeps it small
    p_u = np.where(a >= 0, ndtr(-a) - ndtr(-b),
                   np.where(b <= 0, ndtr(b) - ndtr(a),
                            1.0 - ndtr(a) - ndtr(-b)))
    p_not_u = ndtr(a) + ndtr(-b)

    inside = (gap > -0.5 * eps) & (gap <= 0.5 * eps)
    p_h = np.where(pos, p_h, (gap > 0).astype(float))
    p_l = np.where(pos, p_l, (gap <= 0).astype(float))
    p_u = np.where(pos, p_u, inside.astype(float))
    p_not_u = np.where(pos, p_not_u, 1.0 - inside)
    return p_h, p_l, p_u, p_not_u


def count_eps_accurate(paths, labels, theta, half_eps):
    """Number of rows of ``paths`` for which the labelled triplet is eps-accurate."""
    paths = np.asarray(paths, dtype=float)
    labels = np.asarray(labels)
    half_eps = np.broadcast_to(np.asarray(half_eps, dtype=float), labels.shape)
    gap = paths - theta
    ok = np.ones(paths.shape[0], dtype=bool)
    h = labels == H
    lo = labels == L
    u = labels == U
    if h.any():
        ok &= (gap[:, h] > 0).all(axis=1)
    if lo.any():
        ok &= (gap[:, lo] <= 0).all(axis=1)
    if u.any():
        gu = gap[:, u]
        he = half_eps[u]
        ok &= ((gu > -he) & (gu <= he)).all(axis=1)
    return int(ok.sum())


def path_fscores(paths, pred_upper, theta):
    """F-score of a fixed upper-set prediction against each sampled truth."""
    paths = np.asarray(paths, dtype=float)
    pred = np.asarray(pred_upper, dtype=bool)
    truth = paths > theta
    tp = (truth & pred).sum(axis=1)
    fp = (~truth & pred).sum(axis=1)
    fn = (truth & ~pred).sum(axis=1)
    den = 2 * tp + fp + fn
    out = np.ones(paths.shape[0])
    nz = den > 0
    out[nz] = 2.0 * tp[nz] / den[nz]
    return out
