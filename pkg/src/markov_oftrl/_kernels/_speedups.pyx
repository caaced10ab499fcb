# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot per-iteration simplex solves.

Same contracts as markov_oftrl._kernels._py (the pure-numpy fallback); see its
module docstring for the dual root-finding scheme.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, isfinite

cnp.import_array()

DEF MAX_NEWTON = 200
DEF KKT_TOL = 2.5e-13


def logbarrier_batch(object g_in, double scale):
    cdef cnp.ndarray[double, ndim=2, mode="c"] g = np.ascontiguousarray(g_in, dtype=np.float64)
    if g.shape[1] < 1:
        raise ValueError("expected a (n, A) utility matrix with A >= 1")
    if not (isfinite(scale) and scale > 0.0):
        raise ValueError(f"scale must be a positive finite number, got {scale!r}")
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t dim = g.shape[1]
    cdef cnp.ndarray[double, ndim=2, mode="c"] out = np.empty((n, dim))
    cdef cnp.ndarray[double, ndim=1, mode="c"] z = np.empty(dim)
    cdef Py_ssize_t r, a, it
    cdef double zmax, lo, hi, lam, inv, f, s2, cand, v
    cdef bint ok
    if dim == 1:
        for r in range(n):
            if not isfinite(g[r, 0]):
                raise ValueError("non-finite utility input")
            out[r, 0] = 1.0
        return out
    for r in range(n):
        zmax = -1e308
        for a in range(dim):
            v = g[r, a]
            if not isfinite(v):
                raise ValueError("non-finite utility input")
            z[a] = scale * v
            if z[a] > zmax:
                zmax = z[a]
        lo = zmax + 1.0
        hi = zmax + dim
        lam = hi
        ok = False
        for it in range(MAX_NEWTON):
            f = 0.0
            s2 = 0.0
            for a in range(dim):
                inv = 1.0 / (lam - z[a])
                f += inv
                s2 += inv * inv
            if fabs(f - 1.0) < KKT_TOL:
                ok = True
                break
            if f > 1.0:
                if lam > lo:
                    lo = lam
            else:
                if lam < hi:
                    hi = lam
            cand = lam + (f - 1.0) / s2
            if not isfinite(cand) or cand <= lo or cand >= hi:
                cand = 0.5 * (lo + hi)
            lam = cand
        if not ok:
            raise RuntimeError(f"log-barrier dual Newton did not converge in {MAX_NEWTON} iterations")
        for a in range(dim):
            out[r, a] = 1.0 / (lam - z[a])
    return out


def hedge_batch(object g_in, double scale):
    cdef cnp.ndarray[double, ndim=2, mode="c"] g = np.ascontiguousarray(g_in, dtype=np.float64)
    if g.shape[1] < 1:
        raise ValueError("expected a (n, A) utility matrix with A >= 1")
    if not (isfinite(scale) and scale > 0.0):
        raise ValueError(f"scale must be a positive finite number, got {scale!r}")
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t dim = g.shape[1]
    cdef cnp.ndarray[double, ndim=2, mode="c"] out = np.empty((n, dim))
    cdef Py_ssize_t r, a
    cdef double zmax, total, v
    for r in range(n):
        zmax = -1e308
        for a in range(dim):
            v = g[r, a]
            if not isfinite(v):
                raise ValueError("non-finite utility input")
            v = scale * v
            out[r, a] = v
            if v > zmax:
                zmax = v
        total = 0.0
        for a in range(dim):
            out[r, a] = exp(out[r, a] - zmax)
            total += out[r, a]
        for a in range(dim):
            out[r, a] /= total
    return out
