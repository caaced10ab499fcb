"""Pure-numpy kernel implementations (fallback when the extension is absent).

Both backends expose the same two batched entry points operating on (n, A)
utility matrices:

  logbarrier_batch(g, scale) : rows argmax_x scale*<x, g_r> + sum_a log x_a
  hedge_batch(g, scale)      : rows softmax(scale * g_r)

The log-barrier argmax is solved through its dual: x_a = 1/(lam - scale*g_a)
with lam the unique root of f(lam) = sum_a 1/(lam - scale*g_a) = 1 in the
bracket [max_a scale*g_a + 1, max_a scale*g_a + A]. f is convex and decreasing
there, so a bisection-safeguarded Newton iteration converges quadratically; the
KKT residual |f(lam) - 1| (= |sum_a x_a - 1|) is driven below 2.5e-13.
"""

from __future__ import annotations

import numpy as np

MAX_NEWTON = 200
KKT_TOL = 2.5e-13


def _check(g: np.ndarray, scale: float) -> np.ndarray:
    g = np.ascontiguousarray(g, dtype=np.float64)
    if g.ndim != 2 or g.shape[1] < 1:
        raise ValueError("expected a (n, A) utility matrix with A >= 1")
    if not np.isfinite(g).all():
        raise ValueError("non-finite utility input")
    if not (np.isfinite(scale) and scale > 0.0):
        raise ValueError(f"scale must be a positive finite number, got {scale!r}")
    return g


def logbarrier_batch(g: np.ndarray, scale: float) -> np.ndarray:
    g = _check(g, scale)
    n, dim = g.shape
    if dim == 1:
        return np.ones((n, 1))
    z = scale * g
    zmax = z.max(axis=1)
    lo = zmax + 1.0
    hi = zmax + float(dim)
    lam = hi.copy()
    for _ in range(MAX_NEWTON):
        inv = 1.0 / (lam[:, None] - z)
        f = inv.sum(axis=1)
        resid = np.abs(f - 1.0)
        live = resid >= KKT_TOL
        if not live.any():
            break
        below = live & (f > 1.0)  # lam left of the root: new lower bracket
        above = live & (f < 1.0)
        np.copyto(lo, lam, where=below & (lam > lo))
        np.copyto(hi, lam, where=above & (lam < hi))
        cand = lam + (f - 1.0) / (inv * inv).sum(axis=1)
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi)
        cand = np.where(bad, 0.5 * (lo + hi), cand)
        lam = np.where(live, cand, lam)
    else:
        raise RuntimeError(f"log-barrier dual Newton did not converge in {MAX_NEWTON} iterations")
    return 1.0 / (lam[:, None] - z)


def hedge_batch(g: np.ndarray, scale: float) -> np.ndarray:
    g = _check(g, scale)
    z = scale * g
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)
