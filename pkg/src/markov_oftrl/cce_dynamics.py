"""Decentralized no-external-regret dynamics for coarse correlated equilibria.

Two variants share this module.

Stage-based (``run_cce_stage``): iterations are partitioned into stages of
lengths L_1 = H, L_{tau+1} = floor((1 + 1/H) L_tau). Within stage tau the value
table Q^tau is frozen; every (h, i, s) runs optimistic Hedge over its own
actions with learning rate eta_tau / H on the within-stage utility sums

    ell^t(s, .) = sum_{t' earlier in stage} u^{t'}(s, .) + u^{t-1}(s, .),
    u^t = [Q^tau_{h,i} pi^t_{h,-i}].

When a stage completes, the next table averages the stage's one-step lookaheads

    Q^{tau+1}_h = (1 / L_tau) sum_{t' in stage} (r_h + P_h [Q^tau_{h+1} pi^{t'}_{h+1}])

and every learner restarts: the utility sum clears and the optimism term is
re-seeded from the new table against uniform opponents (a fresh learner's view
of the previous iterate). In theory mode eta_tau = c / (N max(1, ln^4 L_tau)).

Weighted single-loop (``run_cce_smooth``): no stages. Each (h, i, s) runs one
optimistic Hedge whose history is weighted by w_j (w_j ~ j^H, kept normalized
by the current weight exactly as in the swap-regret dynamics), and the value
table is refreshed every iteration with the incremental backward update of
``ce_dynamics.smooth_q_update``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from markov_oftrl import _kernels
from markov_oftrl.ce_dynamics import (
    SmoothRunResult,
    _alloc_policies,
    _validate_run_args,
    full_info_utility,
    joint_policy,
    smooth_q_update,
    uniform_policies,
)
from markov_oftrl.games import MarkovGame
from markov_oftrl.schedules import StageSchedule, stage_schedule, step_size, weight_ratio


def stage_eta_theory(horizon: int, num_players: int, length: int, c: float = 1.0) -> float:
    """Stage learning rate c / (N max(1, ln^4 L))."""
    ln = np.log(length)
    return c / (num_players * max(1.0, ln**4))


@dataclass
class StageRunResult:
    """Trajectory, schedule, and per-stage value tables of a stage-based run."""

    algo: str
    game: MarkovGame
    T: int
    eta: float  # constant rate, or the multiplier c in theory mode
    eta_mode: str
    checkpoints: tuple[int, ...]
    policies: list[list[np.ndarray]]  # [h][i] -> (T+1, S, A_i); row 0 = uniform
    schedule: StageSchedule
    stage_q: np.ndarray  # (num_stages, H, N, S, A_joint); table used during stage s at [s-1]
    stage_eta: np.ndarray  # (num_stages,)
    internals: dict = field(default_factory=dict)


def stage_oftrl_step(cum: np.ndarray, u_prev: np.ndarray, scale: float) -> np.ndarray:
    """One optimistic Hedge step for a single (h, i): rows over states."""
    return _kernels.hedge_batch(cum + u_prev, scale)


def stage_value_update(
    game: MarkovGame, q: np.ndarray, v_sums: np.ndarray, length: int
) -> np.ndarray:
    """Stage-end table: r_h + P_h (mean of the stage's next-step values).

    v_sums has shape (H, S, N); v_sums[h] holds sum_{t'} <joint pi^{t'}_h,
    q[h]> for h >= 1 (row 0 is never read, and values past the horizon are
    implicitly zero).
    """
    H = game.horizon
    out = np.empty_like(q)
    for h in range(H):
        if h + 1 < H:
            v_mean = v_sums[h + 1] / length
            cont = np.einsum("xas,si->ixa", game.transitions[h], v_mean)
            out[h] = game.rewards[h] + cont
        else:
            out[h] = game.rewards[h]
    return out


def run_cce_stage(
    game: MarkovGame,
    T: int,
    eta: float = 0.2,
    checkpoints=None,
    eta_mode: str = "constant",
    theory_c: float = 1.0,
) -> StageRunResult:
    """Run the stage-based dynamics for T iterations (deterministic)."""
    cps = _validate_run_args(game, T, checkpoints)
    if eta_mode == "constant" and not eta > 0:
        raise ValueError("eta must be positive")
    H, N, S = game.horizon, game.num_players, game.num_states
    counts = game.action_counts
    joint = game.joint_size

    sched = stage_schedule(H, T)
    n_stages = sched.num_stages
    etas = np.empty(n_stages)
    for idx in range(n_stages):
        if eta_mode == "theory":
            etas[idx] = stage_eta_theory(H, N, sched.nominal_length(idx + 1), theory_c)
        else:
            etas[idx] = eta

    pols = _alloc_policies(game, T)
    stage_q = np.zeros((n_stages, H, N, S, joint))
    q = np.zeros((H, N, S, joint))
    cum = [[np.zeros((S, a)) for a in counts] for _ in range(H)]
    u_prev = [[np.zeros((S, a)) for a in counts] for _ in range(H)]
    v_sums = np.zeros((H, S, N))
    uniform = uniform_policies(game)
    cp_set = set(cps)
    q_checkpoints: dict[int, np.ndarray] = {}

    for t in range(1, T + 1):
        sigma = sched.stage_of(t)
        start, end = sched.starts[sigma - 1], sched.ends[sigma - 1]
        if t == start and sigma > 1:
            # learner restart against the freshly frozen table
            for h in range(H):
                for i in range(N):
                    cum[h][i][:] = 0.0
                    u_prev[h][i] = full_info_utility(q[h, i], uniform[h], i)
            v_sums[:] = 0.0
        scale = etas[sigma - 1] / H
        for h in range(H):
            for i in range(N):
                pols[h][i][t] = stage_oftrl_step(cum[h][i], u_prev[h][i], scale)
        pol_t = [[pols[h][i][t] for i in range(N)] for h in range(H)]
        for h in range(H):
            for i in range(N):
                u_t = full_info_utility(q[h, i], pol_t[h], i)
                cum[h][i] += u_t
                u_prev[h][i] = u_t
            if h > 0:
                jp = joint_policy(pol_t[h])
                v_sums[h] += np.einsum("sa,isa->si", jp, q[h])
        if t in cp_set:
            q_checkpoints[t] = q.copy()
        if t == end and sched.lengths[sigma - 1] == sched.nominal_length(sigma):
            new_q = stage_value_update(game, q, v_sums, sched.lengths[sigma - 1])
            if sigma < n_stages:
                stage_q[sigma] = new_q
            q = new_q

    return StageRunResult(
        algo="cce_stage",
        game=game,
        T=T,
        eta=theory_c if eta_mode == "theory" else eta,
        eta_mode=eta_mode,
        checkpoints=cps,
        policies=pols,
        schedule=sched,
        stage_q=stage_q,
        stage_eta=etas,
        internals={"q_checkpoints": q_checkpoints},
    )


def run_cce_smooth(
    game: MarkovGame,
    T: int,
    eta: float,
    checkpoints=None,
    eta_mode: str = "constant",
) -> SmoothRunResult:
    """Run the weighted single-loop dynamics for T iterations (deterministic)."""
    cps = _validate_run_args(game, T, checkpoints)
    if not eta > 0:
        raise ValueError("eta must be positive")
    H, N, S = game.horizon, game.num_players, game.num_states
    counts = game.action_counts
    joint = game.joint_size
    cp_set = set(cps)

    pols = _alloc_policies(game, T)
    q = np.zeros((H, N, S, joint))
    cum = [[np.zeros((S, a)) for a in counts] for _ in range(H)]
    u_prev = [[np.zeros((S, a)) for a in counts] for _ in range(H)]
    q_checkpoints: dict[int, np.ndarray] = {}

    for t in range(1, T + 1):
        alpha = step_size(t, H)
        for h in range(H):
            for i in range(N):
                pols[h][i][t] = _kernels.hedge_batch(cum[h][i] + u_prev[h][i], eta)
        pol_t = [[pols[h][i][t] for i in range(N)] for h in range(H)]
        q = smooth_q_update(game, q, pol_t, alpha)
        wr = weight_ratio(t, H)
        for h in range(H):
            for i in range(N):
                u_t = full_info_utility(q[h, i], pol_t[h], i)
                cum[h][i] = wr * (cum[h][i] + u_t)
                u_prev[h][i] = u_t
        if t in cp_set:
            q_checkpoints[t] = q.copy()

    return SmoothRunResult(
        algo="cce_smooth",
        game=game,
        T=T,
        eta=eta,
        eta_mode=eta_mode,
        checkpoints=cps,
        policies=pols,
        q_checkpoints=q_checkpoints,
        swap_tables={},
    )
