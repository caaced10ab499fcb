"""Step sizes alpha_t = (H+1)/(H+t), mixture profiles alpha_t^j, OFTRL weights
w_j, and the stage layout L_1 = H, L_{tau+1} = floor((1 + 1/H) L_tau)."""

import numpy as np
import pytest

from markov_oftrl.schedules import (
    mixture_scan,
    mixture_weight_sums,
    mixture_weights,
    oftrl_weight,
    stage_count_bound,
    stage_schedule,
    step_size,
    weight_ratio,
)


def test_step_size_values():
    assert step_size(1, 3) == 1.0
    assert step_size(2, 1) == pytest.approx(2.0 / 3.0)
    assert step_size(10, 4) == pytest.approx(5.0 / 14.0)
    with pytest.raises(ValueError):
        step_size(0, 2)
    with pytest.raises(ValueError):
        step_size(1, 0)


def test_mixture_weights_sum_to_one():
    for horizon in (1, 2, 3, 7):
        for t in (1, 2, 5, 40, 200):
            w = mixture_weights(t, horizon)
            assert w.shape == (t,)
            assert np.all(w > 0)
            assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_mixture_scan_matches_recurrence():
    # alpha_t^j = C[t] * D[j]: the closed form must reproduce the literal
    # recurrence across the whole triangle
    for horizon in (1, 2, 3):
        t_max = 300
        C, D = mixture_scan(t_max, horizon)
        for t in (1, 2, 3, 17, 100, 300):
            w = mixture_weights(t, horizon)
            np.testing.assert_allclose(C[t] * D[1 : t + 1], w, rtol=1e-12)


def test_mixture_weight_sums_extended_precision():
    for horizon in (1, 2, 5):
        sums = mixture_weight_sums(4096, horizon)
        assert np.abs(np.asarray(sums[1:], dtype=np.float64) - 1.0).max() < 1e-12


def test_prefix_mixture_identity_fuzz():
    # C * cumsum(D * y) realizes sum_{j<=t} alpha_t^j y_j for arbitrary y
    rng = np.random.default_rng(6023)
    for _ in range(10):
        horizon = int(rng.integers(1, 5))
        t_max = int(rng.integers(2, 60))
        y = rng.normal(size=t_max + 1)
        C, D = mixture_scan(t_max, horizon)
        dy = D * y
        dy[0] = 0.0
        mixed = C * np.cumsum(dy)
        for t in (1, t_max // 2 + 1, t_max):
            w = mixture_weights(t, horizon)
            assert mixed[t] == pytest.approx(float(w @ y[1 : t + 1]), abs=1e-12)


def test_oftrl_weights():
    assert oftrl_weight(1, 4) == 1.0
    for horizon in (1, 2, 3):
        for j in range(2, 30):
            ratio = oftrl_weight(j, horizon) / oftrl_weight(j - 1, horizon)
            assert ratio == pytest.approx((horizon + j - 1) / (j - 1))
        # the running-code form: w_t / w_{t+1}
        for t in range(1, 30):
            lhs = weight_ratio(t, horizon) * oftrl_weight(t + 1, horizon)
            assert lhs == pytest.approx(oftrl_weight(t, horizon), rel=1e-12)


def test_oftrl_weights_match_mixture_ratios():
    # w_j = alpha_t^j / alpha_t^1 for every t >= j (t-independent)
    for horizon in (1, 2, 3):
        for t in (5, 12, 25):
            w = mixture_weights(t, horizon)
            for j in range(1, t + 1):
                assert w[j - 1] / w[0] == pytest.approx(oftrl_weight(j, horizon), rel=1e-10)


# ---------------------------------------------------------------------------
# stage layout
# ---------------------------------------------------------------------------


def test_stage_schedule_small_fixture():
    sched = stage_schedule(2, 10)
    assert sched.lengths == (2, 3, 4, 1)
    assert sched.starts == (1, 3, 6, 10)
    assert sched.ends == (2, 5, 9, 10)
    assert sched.num_stages == 4
    # the final stage is truncated: its nominal length is 6
    assert sched.nominal_length(4) == 6
    assert [sched.nominal_length(k) for k in (1, 2, 3)] == [2, 3, 4]


def test_stage_lengths_use_integer_floor_growth():
    # H=4: 4 -> 5 -> 6 -> 7 -> 8 -> 10 (floor(5*(1+1/4)) = 6, not 6.25 rounded)
    sched = stage_schedule(4, 40)
    assert sched.lengths == (4, 5, 6, 7, 8, 10)
    # H=1 doubles every stage
    sched = stage_schedule(1, 15)
    assert sched.lengths == (1, 2, 4, 8)


def test_stage_schedule_partition_fuzz():
    rng = np.random.default_rng(7741)
    for _ in range(25):
        horizon = int(rng.integers(1, 7))
        total = int(rng.integers(1, 3000))
        sched = stage_schedule(horizon, total)
        assert sched.starts[0] == 1
        assert sched.ends[-1] == total
        for k in range(sched.num_stages):
            assert sched.lengths[k] == sched.ends[k] - sched.starts[k] + 1
            if k + 1 < sched.num_stages:
                assert sched.starts[k + 1] == sched.ends[k] + 1
                # only the final stage may fall short of its nominal length
                assert sched.lengths[k] == sched.nominal_length(k + 1)
        assert sched.lengths[-1] <= sched.nominal_length(sched.num_stages)
        assert sched.num_stages <= stage_count_bound(horizon, total)


def test_stage_of_boundaries():
    sched = stage_schedule(2, 40)
    for k in range(sched.num_stages):
        assert sched.stage_of(sched.starts[k]) == k + 1
        assert sched.stage_of(sched.ends[k]) == k + 1
    with pytest.raises(ValueError):
        sched.stage_of(0)
    with pytest.raises(ValueError):
        sched.stage_of(41)


def test_stage_schedule_shorter_than_first_stage():
    sched = stage_schedule(5, 3)
    assert sched.lengths == (3,)
    assert sched.nominal_length(1) == 5


def test_stage_schedule_rejects_bad_args():
    with pytest.raises(ValueError):
        stage_schedule(0, 10)
    with pytest.raises(ValueError):
        stage_schedule(2, 0)
