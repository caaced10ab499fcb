"""Simplex solvers: log-barrier OFTRL argmax, Hedge argmax, stationary distributions.

logbarrier_argmax(g, scale) maximizes scale*<x, g> + sum_a log x_a over the
simplex; hedge_argmax(g, scale) maximizes scale*<x, g> - sum_a x_a log x_a,
whose solution is the softmax of scale*g. stationary_distribution(q) solves
q^T pi = pi, sum pi = 1 by least squares on the stacked system; for reducible q
(non-unique stationary set) the minimum-norm shift from the uniform vector is
taken, i.e. ties break toward uniform.
"""

from __future__ import annotations

import numpy as np

from markov_oftrl import _kernels

_STATIONARY_TOL = 1e-10
_ROW_SUM_TOL = 1e-9


def logbarrier_argmax(g: np.ndarray, scale: float) -> np.ndarray:
    """Log-barrier regularized argmax over the simplex; strictly interior output."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 1:
        raise ValueError("expected a 1-D utility vector")
    return _kernels.logbarrier_batch(g[None, :], scale)[0]


def hedge_argmax(g: np.ndarray, scale: float) -> np.ndarray:
    """Entropy-regularized argmax over the simplex: softmax(scale * g)."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 1:
        raise ValueError("expected a 1-D utility vector")
    return _kernels.hedge_batch(g[None, :], scale)[0]


def _check_row_stochastic(q: np.ndarray) -> None:
    if not np.isfinite(q).all():
        raise ValueError("non-finite matrix entries")
    if np.any(q < -1e-12):
        raise ValueError("negative matrix entries")
    sums = q.sum(axis=-1)
    worst = np.abs(sums - 1.0).max()
    if worst > _ROW_SUM_TOL:
        raise ValueError(f"matrix is not row-stochastic (max |row sum - 1| = {worst:.3e})")


def stationary_distribution(q: np.ndarray, tol: float = _STATIONARY_TOL) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix, ties broken to uniform."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("expected a square matrix")
    _check_row_stochastic(q)
    dim = q.shape[0]
    if dim == 1:
        return np.ones(1)
    u = np.full(dim, 1.0 / dim)
    B = q.T - np.eye(dim)
    M = np.vstack([B, np.ones((1, dim))])
    rhs = np.concatenate([-B @ u, [0.0]])
    delta, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    pi = u + delta
    pi = np.where(pi < 0.0, 0.0, pi)
    pi = pi / pi.sum()
    resid = np.abs(q.T @ pi - pi).max()
    if resid > tol:
        raise RuntimeError(f"stationary residual {resid:.3e} exceeds {tol:.1e}")
    return pi


def stationary_rows(mats: np.ndarray, tol: float = _STATIONARY_TOL) -> np.ndarray:
    """Batched stationary distributions of (n, A, A) row-stochastic matrices.

    Fast path: batched normal equations of the stacked least-squares system,
    with a per-row fall back to stationary_distribution when the batch solve is
    singular or a residual check fails.
    """
    mats = np.asarray(mats, dtype=np.float64)
    n, dim = mats.shape[0], mats.shape[1]
    if dim == 1:
        return np.ones((n, 1))
    u = np.full(dim, 1.0 / dim)
    B = np.swapaxes(mats, 1, 2) - np.eye(dim)
    G = np.einsum("nka,nkb->nab", B, B) + 1.0  # B^T B + 1 1^T (normalization row)
    rhs = -np.einsum("nka,nk->na", B, B @ u)
    try:
        delta = np.linalg.solve(G, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.stack([stationary_distribution(m, tol) for m in mats])
    pi = u + delta
    np.clip(pi, 0.0, None, out=pi)
    pi /= pi.sum(axis=1, keepdims=True)
    resid = np.abs(np.einsum("nab,na->nb", mats, pi) - pi).max(axis=1)
    bad = resid > tol
    if bad.any():
        for k in np.flatnonzero(bad):
            pi[k] = stationary_distribution(mats[k], tol)
    return pi
