"""Simplex solvers and the batched kernels behind them.

The log-barrier argmax is checked through its KKT system (scale*g_a + 1/x_a
constant across coordinates) and against an independent projected-gradient
solver; Hedge against the explicit softmax; stationary distributions against
the defining fixed-point equations, with the batched path compared row-by-row
to the single-matrix path (including batches whose size equals the matrix
dimension). Both kernel backends must agree wherever the extension is built.
"""

import numpy as np
import pytest

from markov_oftrl._kernels import BACKEND, available_backends
from markov_oftrl.oracles import pgd_logbarrier_max
from markov_oftrl.solvers import (
    hedge_argmax,
    logbarrier_argmax,
    stationary_distribution,
    stationary_rows,
)


def _kkt_residual(x, g, scale):
    lam = scale * g + 1.0 / x  # should be one constant vector
    return (lam.max() - lam.min()) / (1.0 + np.abs(lam).max())


def test_logbarrier_kkt_fuzz():
    rng = np.random.default_rng(3301)
    for _ in range(200):
        dim = int(rng.integers(2, 9))
        g = rng.uniform(-8.0, 8.0, size=dim)
        scale = float(rng.uniform(0.05, 2.0))
        x = logbarrier_argmax(g, scale)
        assert np.all(x > 0.0)
        assert x.sum() == pytest.approx(1.0, abs=1e-10)
        assert _kkt_residual(x, g, scale) < 1e-10


def test_logbarrier_matches_projected_gradient():
    rng = np.random.default_rng(5150)
    for _ in range(40):
        dim = int(rng.integers(2, 7))
        g = rng.uniform(-6.0, 6.0, size=dim)
        scale = float(rng.uniform(0.1, 1.0))
        x = logbarrier_argmax(g, scale)
        y = pgd_logbarrier_max(g, scale)
        np.testing.assert_allclose(x, y, atol=1e-8)


def test_logbarrier_symmetry_and_monotonicity():
    # constant utilities -> uniform; raising one coordinate raises its mass
    assert np.allclose(logbarrier_argmax(np.full(5, 2.3), 0.7), 0.2)
    g = np.array([0.0, 0.0, 0.0])
    base = logbarrier_argmax(g, 1.0)
    bumped = logbarrier_argmax(np.array([0.5, 0.0, 0.0]), 1.0)
    assert bumped[0] > base[0]
    assert bumped[1] < base[1]


def test_hedge_is_softmax():
    rng = np.random.default_rng(914)
    for _ in range(50):
        dim = int(rng.integers(1, 8))
        g = rng.normal(size=dim)
        scale = float(rng.uniform(0.01, 3.0))
        e = np.exp(scale * g - scale * g.max())
        np.testing.assert_allclose(hedge_argmax(g, scale), e / e.sum(), rtol=1e-12)
    # shift invariance
    g = rng.normal(size=5)
    np.testing.assert_allclose(hedge_argmax(g, 0.8), hedge_argmax(g + 11.0, 0.8), atol=1e-14)


def test_solvers_reject_bad_inputs():
    with pytest.raises(ValueError):
        logbarrier_argmax(np.zeros((2, 2)), 1.0)
    with pytest.raises(ValueError):
        logbarrier_argmax(np.array([np.inf, 0.0]), 1.0)
    with pytest.raises(ValueError):
        logbarrier_argmax(np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        hedge_argmax(np.zeros(3), -1.0)


# ---------------------------------------------------------------------------
# kernel backends
# ---------------------------------------------------------------------------


def test_batch_matches_single_row():
    rng = np.random.default_rng(2207)
    from markov_oftrl import _kernels

    g = rng.uniform(-4.0, 4.0, size=(17, 5))
    lb = _kernels.logbarrier_batch(g, 0.6)
    he = _kernels.hedge_batch(g, 0.6)
    for r in range(g.shape[0]):
        np.testing.assert_allclose(lb[r], logbarrier_argmax(g[r], 0.6), atol=1e-12)
        np.testing.assert_allclose(he[r], hedge_argmax(g[r], 0.6), atol=1e-14)


def test_backends_agree():
    backends = available_backends()
    assert "python" in backends
    assert BACKEND in backends
    if len(backends) < 2:
        pytest.skip("extension not built; only the numpy backend is importable")
    rng = np.random.default_rng(808)
    for dim in (1, 2, 3, 8):
        g = rng.uniform(-5.0, 5.0, size=(64, dim))
        for scale in (0.05, 0.7, 2.5):
            outs = [mod.logbarrier_batch(g, scale) for mod in backends.values()]
            np.testing.assert_allclose(outs[0], outs[1], atol=1e-13)
            outs = [mod.hedge_batch(g, scale) for mod in backends.values()]
            np.testing.assert_allclose(outs[0], outs[1], atol=1e-13)


def test_kernels_dim_one():
    from markov_oftrl import _kernels

    out = _kernels.logbarrier_batch(np.array([[3.0], [-1.0]]), 0.5)
    assert np.array_equal(out, np.ones((2, 1)))
    out = _kernels.hedge_batch(np.array([[3.0]]), 0.5)
    assert np.array_equal(out, np.ones((1, 1)))


# ---------------------------------------------------------------------------
# stationary distributions
# ---------------------------------------------------------------------------


def _random_stochastic(rng, dim):
    q = rng.random((dim, dim)) + 0.05
    return q / q.sum(axis=1, keepdims=True)


def test_stationary_known_cases():
    # 2-state chain: pi = (b, a) / (a + b)
    a, b = 0.3, 0.1
    q = np.array([[1 - a, a], [b, 1 - b]])
    np.testing.assert_allclose(stationary_distribution(q), [b / (a + b), a / (a + b)], atol=1e-12)
    # deterministic swap -> uniform
    np.testing.assert_allclose(stationary_distribution(np.array([[0.0, 1.0], [1.0, 0.0]])), 0.5)
    # identity: every distribution is stationary; ties break toward uniform
    np.testing.assert_allclose(stationary_distribution(np.eye(4)), 0.25)
    assert np.array_equal(stationary_distribution(np.ones((1, 1))), [1.0])


def test_stationary_fixed_point_fuzz():
    rng = np.random.default_rng(118)
    for _ in range(100):
        dim = int(rng.integers(2, 9))
        q = _random_stochastic(rng, dim)
        pi = stationary_distribution(q)
        assert np.all(pi >= 0.0)
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(q.T @ pi - pi).max() < 1e-10


def test_stationary_rows_matches_single():
    rng = np.random.default_rng(515)
    # n == dim batches included: the stacked solve must not broadcast wrongly
    for n, dim in [(2, 2), (3, 3), (1, 4), (9, 2), (6, 5)]:
        mats = np.stack([_random_stochastic(rng, dim) for _ in range(n)])
        batch = stationary_rows(mats)
        single = np.stack([stationary_distribution(m) for m in mats])
        np.testing.assert_allclose(batch, single, atol=1e-9)
        assert np.abs(np.einsum("nab,na->nb", mats, batch) - batch).max() < 1e-10


def test_stationary_rows_fallback_on_reducible_rows():
    # a batch mixing an identity row (singular stacked system is fine via
    # least squares, but ties must still break toward uniform) and a chain
    mats = np.stack([np.eye(3), _random_stochastic(np.random.default_rng(0), 3)])
    out = stationary_rows(mats)
    np.testing.assert_allclose(out[0], 1.0 / 3.0, atol=1e-9)
    assert np.abs(mats[1].T @ out[1] - out[1]).max() < 1e-10


def test_stationary_rejects_bad_matrices():
    with pytest.raises(ValueError):
        stationary_distribution(np.ones((2, 3)))
    with pytest.raises(ValueError):
        stationary_distribution(np.array([[0.5, 0.6], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        stationary_distribution(np.array([[1.5, -0.5], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        stationary_distribution(np.array([[np.nan, 1.0], [0.5, 0.5]]))
