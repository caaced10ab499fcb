"""No-external-regret dynamics.

Stage-based: the value table is frozen within each stage (L_1 = H, floor
growth), the stage-end table averages the window's one-step lookaheads, and
learners restart with optimism re-seeded from the new table against uniform
opponents. Weighted single-loop: optimistic Hedge over the w_j-weighted
history with the incremental value update. Both are replayed naively here
from the recorded trajectories.
"""

import numpy as np
import pytest

from markov_oftrl.cce_dynamics import run_cce_smooth, run_cce_stage, stage_eta_theory
from markov_oftrl.ce_dynamics import full_info_utility, joint_policy, uniform_policies
from markov_oftrl.gap_eval import evaluate_run
from markov_oftrl.schedules import oftrl_weight, stage_schedule, step_size


def _softmax_rows(z):
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def test_stage_run_is_deterministic(game):
    a = run_cce_stage(game, 24, eta=0.5)
    b = run_cce_stage(game, 24, eta=0.5)
    for h in range(game.horizon):
        for i in range(game.num_players):
            assert np.array_equal(a.policies[h][i], b.policies[h][i])
    assert np.array_equal(a.stage_q, b.stage_q)


def test_stage_schedule_attached(game, stage_run):
    sched = stage_run.schedule
    assert sched == stage_schedule(game.horizon, stage_run.T)
    assert stage_run.stage_q.shape[0] == sched.num_stages
    assert np.all(stage_run.stage_eta == 0.5)


def test_stage_one_plays_uniform_and_q2_is_reward(game, stage_run):
    sched = stage_run.schedule
    # the first table is zero, so every stage-1 policy is uniform ...
    assert np.all(stage_run.stage_q[0] == 0.0)
    for t in range(1, sched.ends[0] + 1):
        for h in range(game.horizon):
            for i in range(game.num_players):
                np.testing.assert_allclose(stage_run.policies[h][i][t], 0.5, atol=1e-14)
    # ... and the stage-2 table is exactly the reward table
    assert np.array_equal(stage_run.stage_q[1], game.rewards)
    assert stage_run.stage_q[1][0, 0, 0, 0] == 0.8


def test_table_frozen_within_stage(game, stage_run):
    sched = stage_run.schedule
    cp_q = stage_run.internals["q_checkpoints"]
    for t in stage_run.checkpoints:
        sigma = sched.stage_of(t)
        assert np.array_equal(cp_q[t], stage_run.stage_q[sigma - 1])


def test_stage_hedge_replay(game, stage_run):
    # pi^t = softmax((eta_sigma / H) (sum_{t' earlier in stage} u^{t'} + u^{t-1}))
    # with u from the stage's frozen table; at the stage start the optimism is
    # the new table against uniform opponents
    sched = stage_run.schedule
    H, N = game.horizon, game.num_players
    uniform = uniform_policies(game)
    for sigma in (2, 3, 5):
        start, end = sched.starts[sigma - 1], sched.ends[sigma - 1]
        q = stage_run.stage_q[sigma - 1]
        scale = stage_run.stage_eta[sigma - 1] / H
        for h in range(H):
            for i in range(N):
                cum = np.zeros_like(stage_run.policies[h][i][0])
                u_prev = full_info_utility(q[h, i], uniform[h], i)
                for t in range(start, end + 1):
                    expect = _softmax_rows(scale * (cum + u_prev))
                    np.testing.assert_allclose(
                        stage_run.policies[h][i][t], expect, atol=1e-12
                    )
                    pol_t = [stage_run.policies[h][k][t] for k in range(N)]
                    u_t = full_info_utility(q[h, i], pol_t, i)
                    cum += u_t
                    u_prev = u_t


def test_stage_value_update_naive(game, stage_run):
    # Q^{sigma+1}_h = r_h + P_h (1/L_sigma) sum_{t' in W_sigma} <joint pi^{t'}_{h+1}, Q^sigma_{h+1}>
    sched = stage_run.schedule
    H, N, S = game.horizon, game.num_players, game.num_states
    for sigma in range(1, sched.num_stages):
        if sched.lengths[sigma - 1] != sched.nominal_length(sigma):
            continue
        start, end = sched.starts[sigma - 1], sched.ends[sigma - 1]
        q = stage_run.stage_q[sigma - 1]
        for h in range(H):
            if h + 1 < H:
                v_mean = np.zeros((S, N))
                for t in range(start, end + 1):
                    jp = joint_policy([stage_run.policies[h + 1][k][t] for k in range(N)])
                    v_mean += np.einsum("sa,isa->si", jp, q[h + 1])
                v_mean /= end - start + 1
                cont = np.einsum("xas,si->ixa", game.transitions[h], v_mean)
            else:
                cont = 0.0
            np.testing.assert_allclose(
                stage_run.stage_q[sigma][h], game.rewards[h] + cont, atol=1e-12
            )


def test_truncated_final_stage_keeps_last_table(game, stage_run):
    # T=40 truncates stage 7 (nominal 19, actual 3): no stage-end update runs,
    # so the last stored table is the one stage 7 played against
    sched = stage_run.schedule
    assert sched.lengths[-1] < sched.nominal_length(sched.num_stages)
    cp_q = stage_run.internals["q_checkpoints"]
    assert np.array_equal(cp_q[40], stage_run.stage_q[-1])


def test_run_exactly_one_stage(game):
    # T = L_1: the single stage completes but there is no next stage to seed
    run = run_cce_stage(game, 2, eta=0.4)
    assert run.schedule.lengths == (2,)
    assert np.all(run.stage_q == 0.0)
    reports = evaluate_run(run)
    assert reports[-1].uniform_fallback_count == 2


def test_run_shorter_than_one_stage(game):
    run = run_cce_stage(game, 1, eta=0.4)
    assert run.schedule.lengths == (1,)
    reports = evaluate_run(run)
    assert reports[-1].uniform_fallback_count == 1
    for p in reports[-1].players:
        assert 0.0 <= p.value_certified <= game.horizon


def test_stage_theory_mode(game):
    run = run_cce_stage(game, 12, eta_mode="theory", theory_c=2.0)
    assert run.eta == 2.0
    assert run.eta_mode == "theory"
    sched = run.schedule
    for k in range(sched.num_stages):
        want = stage_eta_theory(game.horizon, game.num_players, sched.nominal_length(k + 1), 2.0)
        assert run.stage_eta[k] == pytest.approx(want, rel=1e-15)
    # ln L <= 1 for short stages: the max(1, .) clamp keeps eta = c / N
    assert stage_eta_theory(2, 2, 2, 1.0) == pytest.approx(0.5)


def test_stage_rejects_bad_eta(game):
    with pytest.raises(ValueError):
        run_cce_stage(game, 4, eta=0.0)


# ---------------------------------------------------------------------------
# weighted single-loop variant
# ---------------------------------------------------------------------------


def test_smooth_run_is_deterministic(game):
    a = run_cce_smooth(game, 16, 0.4)
    b = run_cce_smooth(game, 16, 0.4)
    for h in range(game.horizon):
        for i in range(game.num_players):
            assert np.array_equal(a.policies[h][i], b.policies[h][i])


def test_smooth_trajectory_valid(game, smooth_run):
    assert smooth_run.algo == "cce_smooth"
    assert smooth_run.swap_tables == {}
    for h in range(game.horizon):
        for i in range(game.num_players):
            arr = smooth_run.policies[h][i]
            assert np.all(arr >= 0.0)
            np.testing.assert_allclose(arr.sum(axis=2), 1.0, atol=1e-9)
            np.testing.assert_allclose(arr[1], 0.5, atol=1e-12)


def test_smooth_hedge_replay(game):
    # pi^t = softmax(eta (sum_{j<t} (w_j / w_t) u^j + u^{t-1}))
    T, eta = 10, 0.45
    run = run_cce_smooth(game, T, eta, checkpoints=range(1, T + 1))
    H, N = game.horizon, game.num_players
    for t in (2, 3, 7, 10):
        for h in range(H):
            for i in range(N):
                u = {
                    j: full_info_utility(
                        run.q_checkpoints[j][h, i],
                        [run.policies[h][k][j] for k in range(N)],
                        i,
                    )
                    for j in range(1, t)
                }
                hist = u[t - 1].copy()
                for j in range(1, t):
                    hist += (oftrl_weight(j, H) / oftrl_weight(t, H)) * u[j]
                np.testing.assert_allclose(
                    run.policies[h][i][t], _softmax_rows(eta * hist), atol=1e-12
                )


def test_smooth_value_update_matches_recursion(game):
    # same incremental update as the swap-regret dynamics
    T = 8
    run = run_cce_smooth(game, T, 0.4, checkpoints=range(1, T + 1))
    H, N = game.horizon, game.num_players
    prev = np.zeros_like(run.q_checkpoints[1])
    for t in range(1, T + 1):
        alpha = step_size(t, H)
        cur = run.q_checkpoints[t]
        for h in range(H):
            if h + 1 < H:
                jp = joint_policy([run.policies[h + 1][k][t] for k in range(N)])
                v = np.einsum("sa,isa->si", jp, cur[h + 1])
            else:
                v = np.zeros((game.num_states, N))
            cont = np.einsum("xas,si->ixa", game.transitions[h], v)
            want = (1 - alpha) * prev[h] + alpha * (game.rewards[h] + cont)
            np.testing.assert_allclose(cur[h], want, atol=1e-12)
        prev = cur
