"""Decentralized no-swap-regret dynamics for correlated equilibria.

Every (h, i, s) triple runs a swap-regret learner built from A_i log-barrier
OFTRL base learners, one per recommendation action a_i. At iteration t the base
learner for a_i sees the weighted utility history

    ell^{t,a_i}(s, .) = sum_{j<t} w_j pi^j_i(s, a_i) [Q^j_i pi^j_{-i}](s, .)
                        + w_t pi^{t-1}_i(s, a_i) [Q^{t-1}_i pi^{t-1}_{-i}](s, .)

(the last term is the optimistic prediction), solves the log-barrier argmax of
eta * ell / w_t, and the player's policy pi^t_i(s, .) is the stationary
distribution of the row-stochastic matrix whose rows are the base learners'
outputs. Because w_j grows like j^H, the running code keeps the history
normalized by the current w_t and only multiplies by w_t/w_{t+1} = t/(H+t).

After all policies are updated, values are refreshed backward in h with the
incremental step size alpha_t = (H+1)/(H+t):

    Q^t_{h,i} = (1 - alpha_t) Q^{t-1}_{h,i}
                + alpha_t (r_{h,i} + P_h [Q^t_{h+1,i} pi^t_{h+1}]).

A per-(h,i,s) swap-regret table G_t = (1-alpha_t) G_{t-1} + alpha_t *
outer(pi^t_i(s,.), u^t) is maintained alongside; its row-wise max-minus-diagonal
sums equal the mixture swap regret and are snapshotted at checkpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from markov_oftrl import _kernels
from markov_oftrl.games import MarkovGame
from markov_oftrl.schedules import step_size, weight_ratio
from markov_oftrl.solvers import stationary_rows


def default_checkpoints(T: int) -> tuple[int, ...]:
    """Powers of two up to T, plus T itself."""
    cps = set()
    p = 1
    while p <= T:
        cps.add(p)
        p *= 2
    cps.add(T)
    return tuple(sorted(cps))


def _validate_run_args(game: MarkovGame, T: int, checkpoints) -> tuple[int, ...]:
    if T < 1:
        raise ValueError("T must be >= 1")
    if checkpoints is None:
        cps = default_checkpoints(T)
    else:
        cps = tuple(sorted(set(int(c) for c in checkpoints)))
        if not cps or cps[0] < 1 or cps[-1] > T:
            raise ValueError("checkpoints must be non-empty and lie in [1, T]")
    return cps


def uniform_policies(game: MarkovGame) -> list[list[np.ndarray]]:
    """[h][i] -> (S, A_i) uniform rows."""
    return [
        [np.full((game.num_states, a), 1.0 / a) for a in game.action_counts]
        for _ in range(game.horizon)
    ]


def joint_policy(policies_h: list[np.ndarray]) -> np.ndarray:
    """Product distribution over flat joint actions; (S, A_joint), row-major."""
    out = policies_h[0]
    for pol in policies_h[1:]:
        out = (out[:, :, None] * pol[:, None, :]).reshape(out.shape[0], -1)
    return out


def full_info_utility(q_slice: np.ndarray, policies: list[np.ndarray], player: int) -> np.ndarray:
    """[Q_{h,i} pi_{h,-i}](s, .): contract a (S, A_joint) value slice with every
    other player's (S, A_k) policy, leaving (S, A_player)."""
    counts = [p.shape[1] for p in policies]
    S = q_slice.shape[0]
    shaped = q_slice.reshape(S, *counts)
    shaped = np.moveaxis(shaped, 1 + player, 1)
    for k in range(len(counts) - 1, -1, -1):
        if k == player:
            continue
        shaped = np.einsum("si...a,sa->si...", shaped, policies[k])
    return shaped


def bm_policy_step(
    cum: np.ndarray, pi_prev: np.ndarray, u_prev: np.ndarray, eta: float
) -> tuple[np.ndarray, np.ndarray]:
    """One Blum-Mansour step for a single (h, i, s).

    cum is the (A, A) normalized weighted history (row = recommendation), and
    the optimism row for a_i is pi_prev[a_i] * u_prev. Returns (pi, q) where q
    stacks the base learners' log-barrier outputs and pi is q's stationary
    distribution.
    """
    ell = cum + pi_prev[:, None] * u_prev[None, :]
    q = _kernels.logbarrier_batch(ell, eta)
    pi = stationary_rows(q[None])[0]
    return pi, q


@dataclass
class SmoothRunResult:
    """Trajectory and checkpoint snapshots of an iteration-mixture run."""

    algo: str
    game: MarkovGame
    T: int
    eta: float
    eta_mode: str
    checkpoints: tuple[int, ...]
    policies: list[list[np.ndarray]]  # [h][i] -> (T+1, S, A_i); row 0 = uniform
    q_checkpoints: dict[int, np.ndarray]  # t -> (H, N, S, A_joint)
    swap_tables: dict[int, list[list[np.ndarray]]]  # t -> [h][i] -> (S, A_i, A_i)
    internals: dict = field(default_factory=dict)


def _alloc_policies(game: MarkovGame, T: int) -> list[list[np.ndarray]]:
    pols = []
    for _ in range(game.horizon):
        per_h = []
        for a in game.action_counts:
            arr = np.empty((T + 1, game.num_states, a))
            arr[0] = 1.0 / a
            per_h.append(arr)
        pols.append(per_h)
    return pols


def smooth_q_update(
    game: MarkovGame, q: np.ndarray, policies_t: list[list[np.ndarray]], alpha: float
) -> np.ndarray:
    """One backward pass of the incremental value update; returns the new
    (H, N, S, A_joint) table. policies_t[h][i] is the iteration's (S, A_i)."""
    H, N, S = game.horizon, game.num_players, game.num_states
    out = np.empty_like(q)
    v_next = np.zeros((S, N))
    for h in range(H - 1, -1, -1):
        if h < H - 1:
            jp = joint_policy(policies_t[h + 1])
            v_next = np.einsum("sa,isa->si", jp, out[h + 1])
        cont = np.einsum("xas,si->ixa", game.transitions[h], v_next)
        out[h] = (1.0 - alpha) * q[h] + alpha * (game.rewards[h] + cont)
    return out


def run_ce(
    game: MarkovGame,
    T: int,
    eta: float,
    checkpoints=None,
    eta_mode: str = "constant",
    record_internals: bool = False,
) -> SmoothRunResult:
    """Run the swap-regret dynamics for T iterations (deterministic)."""
    cps = _validate_run_args(game, T, checkpoints)
    if not eta > 0:
        raise ValueError("eta must be positive")
    H, N, S = game.horizon, game.num_players, game.num_states
    counts = game.action_counts
    joint = game.joint_size
    cp_set = set(cps)

    pols = _alloc_policies(game, T)
    q = np.zeros((H, N, S, joint))
    cum = [[np.zeros((S, a, a)) for a in counts] for _ in range(H)]
    swap = [[np.zeros((S, a, a)) for a in counts] for _ in range(H)]
    u_prev = [[np.zeros((S, a)) for a in counts] for _ in range(H)]
    q_checkpoints: dict[int, np.ndarray] = {}
    swap_tables: dict[int, list[list[np.ndarray]]] = {}
    internals: dict = {"q_rows": {}, "ell_rows": {}} if record_internals else {}

    for t in range(1, T + 1):
        alpha = step_size(t, H)
        # policy update: BM with log-barrier OFTRL base learners
        for h in range(H):
            for i in range(N):
                a = counts[i]
                ell = cum[h][i] + pols[h][i][t - 1][:, :, None] * u_prev[h][i][:, None, :]
                rows = _kernels.logbarrier_batch(ell.reshape(S * a, a), eta).reshape(S, a, a)
                pols[h][i][t] = stationary_rows(rows)
                if record_internals:
                    internals["q_rows"][(t, h, i)] = rows.copy()
                    internals["ell_rows"][(t, h, i)] = ell.copy()
        pol_t = [[pols[h][i][t] for i in range(N)] for h in range(H)]
        # value update, backward in h with this iteration's policies
        q = smooth_q_update(game, q, pol_t, alpha)
        # refresh utilities / accumulators with the new Q^t and pi^t
        wr = weight_ratio(t, H)
        for h in range(H):
            for i in range(N):
                u_t = full_info_utility(q[h, i], pol_t[h], i)
                z = pol_t[h][i][:, :, None] * u_t[:, None, :]
                cum[h][i] = wr * (cum[h][i] + z)
                swap[h][i] = (1.0 - alpha) * swap[h][i] + alpha * z
                u_prev[h][i] = u_t
        if t in cp_set:
            q_checkpoints[t] = q.copy()
            swap_tables[t] = [[swap[h][i].copy() for i in range(N)] for h in range(H)]

    return SmoothRunResult(
        algo="ce_smooth",
        game=game,
        T=T,
        eta=eta,
        eta_mode=eta_mode,
        checkpoints=cps,
        policies=pols,
        q_checkpoints=q_checkpoints,
        swap_tables=swap_tables,
        internals=internals,
    )


def theory_eta_smooth(game: MarkovGame) -> float:
    """Learning rate 1/(256 N H sqrt(H A_max)) under which the gap guarantee
    for the weighted single-loop dynamics holds."""
    H, N = game.horizon, game.num_players
    a_max = max(game.action_counts)
    return float(1.0 / (256.0 * N * H * np.sqrt(H * a_max)))
