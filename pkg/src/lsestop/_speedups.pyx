# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-candidate and per-path kernels.

Same contracts as ``lsestop._pykernels``; results agree to rounding.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport erfc, sqrt

cnp.import_array()

cdef double SQRT1_2 = 0.7071067811865476


cdef inline double ncdf(double x) nogil:
    return 0.5 * erfc(-x * SQRT1_2)


def tri_probs(mu, sigma, double theta, eps):
    cdef cnp.ndarray[double, ndim=1] m, s, e
    m_b, s_b, e_b = np.broadcast_arrays(
        np.asarray(mu, dtype=float), np.asarray(sigma, dtype=float),
        np.asarray(eps, dtype=float))
    shape = m_b.shape
    m = np.ascontiguousarray(m_b, dtype=float).ravel()
    s = np.ascontiguousarray(s_b, dtype=float).ravel()
    e = np.ascontiguousarray(e_b, dtype=float).ravel()
    cdef Py_ssize_t n = m.shape[0], i
    cdef cnp.ndarray[double, ndim=1] ph = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] pl = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] pu = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] pnu = np.empty(n)
    cdef double gap, z, a, b, half
    with nogil:
        for i in range(n):
            gap = m[i] - theta
            half = 0.5 * e[i]
            if s[i] > 0:
                z = gap / s[i]
                ph[i] = ncdf(z)
                pl[i] = ncdf(-z)
                a = (-half - gap) / s[i]
                b = (half - gap) / s[i]
                if a >= 0:
                    pu[i] = ncdf(-a) - ncdf(-b)
                elif b <= 0:
                    pu[i] = ncdf(b) - ncdf(a)
                else:
                    pu[i] = 1.0 - ncdf(a) - ncdf(-b)
                pnu[i] = ncdf(a) + ncdf(-b)
            else:
                ph[i] = 1.0 if gap > 0 else 0.0
                pl[i] = 1.0 - ph[i]
                pu[i] = 1.0 if (gap > -half and gap <= half) else 0.0
                pnu[i] = 1.0 - pu[i]
    return (ph.reshape(shape), pl.reshape(shape),
            pu.reshape(shape), pnu.reshape(shape))


def count_eps_accurate(paths, labels, double theta, half_eps):
    cdef cnp.ndarray[double, ndim=2] P = np.ascontiguousarray(paths, dtype=float)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] lab = np.ascontiguousarray(labels, dtype=np.int8)
    cdef cnp.ndarray[double, ndim=1] he = np.ascontiguousarray(
        np.broadcast_to(np.asarray(half_eps, dtype=float), (lab.shape[0],)))
    cdef Py_ssize_t n = P.shape[0], m = P.shape[1], r, j
    cdef long count = 0
    cdef double g
    cdef bint ok
    with nogil:
        for r in range(n):
            ok = True
            for j in range(m):
                g = P[r, j] - theta
                if lab[j] == 0:
                    if not (g > 0):
                        ok = False
                elif lab[j] == 1:
                    if not (g <= 0):
                        ok = False
                elif not (g > -he[j] and g <= he[j]):
                    ok = False
                if not ok:
                    break
            if ok:
                count += 1
    return int(count)


def path_fscores(paths, pred_upper, double theta):
    cdef cnp.ndarray[double, ndim=2] P = np.ascontiguousarray(paths, dtype=float)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] pred = np.ascontiguousarray(
        pred_upper, dtype=np.uint8)
    cdef Py_ssize_t n = P.shape[0], m = P.shape[1], r, j
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef long tp, fp, fn, t, q
    with nogil:
        for r in range(n):
            tp = 0
            fp = 0
            fn = 0
            # branchless counts; the comparisons are unpredictable on sampled paths
            for j in range(m):
                t = P[r, j] > theta
                q = pred[j]
                tp += t & q
                fp += q & (1 - t)
                fn += t & (1 - q)
            if 2 * tp + fp + fn == 0:
                out[r] = 1.0
            else:
                out[r] = 2.0 * tp / (2 * tp + fp + fn)
    return out
