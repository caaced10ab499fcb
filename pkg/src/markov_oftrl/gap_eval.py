"""Exact evaluation of certified output policies.

The iteration-mixture certificate (swap-regret dynamics and the weighted
single-loop Hedge variant) replays history: at step h with current index t it
samples j <= t with probability alpha_t^j, plays the recorded joint policy
pi^j_h, and continues from h+1 with index j. Its value therefore satisfies

    V[h][t](s, i) = sum_j alpha_t^j < pi^j_h(s, .), (r_{h,i} + P_h V[h+1][j])(s, .) >

and every quantity of that shape is computed for all t at once through the
factorization alpha_t^j = C_t D_j (prefix mixture = C * cumsum(D * y)). The
stage certificate samples j uniformly from the previous stage's window and
recurses with index j, so its tables are indexed by stage; iterations in the
first stage (no prior stage) fall back to uniform product play.

Deviation benchmarks per player:

  * exact swap gap (swap-regret certificates only): enumerate every strategy
    modification phi: (h, s, a_i) -> a_i' and run the indexed backward DP with
    the recommendation rewired, in chunks; exact by exhaustiveness;
  * informed upper bound: grant the deviator the sampled index j; the
    per-index best response folds the max over own actions inside the mixture
    (for swap certificates the per-recommendation max collapses to the same
    quantity because opponents' play is independent of the recommendation);
  * Markov lower bound: enumerate deterministic Markov policies of the
    deviating player and evaluate each against the certified opponents.

Both enumerations refuse to run past ENUMERATION_GUARD alternatives. The
bounds always satisfy lower <= exact <= upper (up to float noise); the lower
bound may be negative (abandoning recommendations can genuinely hurt).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from markov_oftrl.ce_dynamics import SmoothRunResult
from markov_oftrl.cce_dynamics import StageRunResult
from markov_oftrl.games import MarkovGame
from markov_oftrl.schedules import StageSchedule, mixture_scan, stage_schedule

ENUMERATION_GUARD = 10**6
_CHUNK = 32


class EnumerationGuardError(RuntimeError):
    """Raised when an exact enumeration would exceed ENUMERATION_GUARD; use
    the informed upper bound instead."""


def swap_enumeration_count(game: MarkovGame, player: int) -> int:
    a = game.action_counts[player]
    return a ** (game.horizon * game.num_states * a)


def markov_enumeration_count(game: MarkovGame, player: int) -> int:
    a = game.action_counts[player]
    return a ** (game.horizon * game.num_states)


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------


def _trajectory_length(policies) -> int:
    return policies[0][0].shape[0] - 1


def _check_t(policies, t_max: int) -> None:
    avail = _trajectory_length(policies)
    if not 1 <= t_max <= avail:
        raise ValueError(f"requested t={t_max} but trajectory holds 1..{avail}")


def _joint_curve(policies_h, t_max: int) -> np.ndarray:
    """(t_max+1, S, prod A_k) product of all players' policy curves."""
    out = policies_h[0][: t_max + 1]
    for pol in policies_h[1:]:
        p = pol[: t_max + 1]
        out = (out[:, :, :, None] * p[:, :, None, :]).reshape(out.shape[0], out.shape[1], -1)
    return out


def _others_curve(policies_h, player: int, t_max: int) -> np.ndarray:
    """(t_max+1, S, prod_{k != player} A_k) opponents' product curves."""
    mats = [p[: t_max + 1] for k, p in enumerate(policies_h) if k != player]
    if not mats:
        n, S = t_max + 1, policies_h[player].shape[1]
        return np.ones((n, S, 1))
    out = mats[0]
    for p in mats[1:]:
        out = (out[:, :, :, None] * p[:, :, None, :]).reshape(out.shape[0], out.shape[1], -1)
    return out


def _own_views(game: MarkovGame, h: int, player: int) -> tuple[np.ndarray, np.ndarray]:
    """Reward (S, A_i, A_-i) and transition (S, A_i, A_-i, S') views with the
    player's own action split out of the flat joint index."""
    counts = game.action_counts
    S = game.num_states
    a_own = counts[player]
    r = game.rewards[h, player].reshape(S, *counts)
    r = np.moveaxis(r, 1 + player, 1).reshape(S, a_own, -1)
    p = game.transitions[h].reshape(S, *counts, S)
    p = np.moveaxis(p, 1 + player, 1).reshape(S, a_own, -1, S)
    return np.ascontiguousarray(r), np.ascontiguousarray(p)


def _prefix_mixture(y: np.ndarray, C: np.ndarray, D: np.ndarray, axis: int = 0) -> np.ndarray:
    """out[t] = sum_{j<=t} alpha_t^j y[j] along the given axis; slot 0 -> 0."""
    shape = [1] * y.ndim
    shape[axis] = y.shape[axis]
    dy = D.reshape(shape) * y
    zero = [slice(None)] * y.ndim
    zero[axis] = 0
    dy[tuple(zero)] = 0.0
    out = C.reshape(shape) * np.cumsum(dy, axis=axis)
    out[tuple(zero)] = 0.0
    return out


def _decode_base(ids: np.ndarray, digits: int, base: int) -> np.ndarray:
    """Big-endian base-`base` digits of each id; (len(ids), digits) int64."""
    out = np.empty((ids.size, digits), dtype=np.int64)
    rem = ids.astype(np.int64).copy()
    for pos in range(digits - 1, -1, -1):
        out[:, pos] = rem % base
        rem //= base
    return out


# ---------------------------------------------------------------------------
# iteration-mixture certificates
# ---------------------------------------------------------------------------


def certified_value_ce(game: MarkovGame, policies, t_max: int) -> np.ndarray:
    """(H+1, t_max+1, S, N) certified-policy value table; row h=H and slot
    t=0 are zero. V[h][t][s][i] is the value for player i of replaying the
    mixture certificate from (h, s) with index t."""
    _check_t(policies, t_max)
    H, N, S = game.horizon, game.num_players, game.num_states
    C, D = mixture_scan(t_max, H)
    V = np.zeros((H + 1, t_max + 1, S, N))
    for h in range(H - 1, -1, -1):
        jp = _joint_curve(policies[h], t_max)
        cont = np.einsum("sax,txi->tisa", game.transitions[h], V[h + 1])
        target = game.rewards[h][None] + cont
        y = np.einsum("tsa,tisa->tsi", jp, target)
        V[h] = _prefix_mixture(y, C, D)
    return V


def informed_upper_table(game: MarkovGame, policies, t_max: int, player: int) -> np.ndarray:
    """(H+1, t_max+1, S) index-informed best-deviation value table M; the max
    over the deviator's action sits inside the mixture."""
    _check_t(policies, t_max)
    H, S = game.horizon, game.num_states
    C, D = mixture_scan(t_max, H)
    M = np.zeros((H + 1, t_max + 1, S))
    for h in range(H - 1, -1, -1):
        r_view, p_view = _own_views(game, h, player)
        others = _others_curve(policies[h], player, t_max)
        cont = np.einsum("sbcx,tx->tsbc", p_view, M[h + 1])
        target = r_view[None] + cont
        U = np.einsum("tsc,tsbc->tsb", others, target)
        M[h] = _prefix_mixture(U.max(axis=2), C, D)
    return M


def swap_deviation_curve(
    game: MarkovGame, policies, t_max: int, player: int, chunk: int = _CHUNK
) -> np.ndarray:
    """(t_max+1,) best modified certificate value max_phi V^{phi}; slot 0 is
    zero. Modifications are enumerated exhaustively (base-A_i digits over
    slots ordered h-major, then state, then recommendation)."""
    _check_t(policies, t_max)
    count = swap_enumeration_count(game, player)
    if count > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"{count} strategy modifications exceed the guard ({ENUMERATION_GUARD}); "
            "use the informed upper bound"
        )
    H, S = game.horizon, game.num_states
    A = game.action_counts[player]
    C, D = mixture_scan(t_max, H)
    own = [policies[h][player][: t_max + 1] for h in range(H)]
    others = [_others_curve(policies[h], player, t_max) for h in range(H)]
    views = [_own_views(game, h, player) for h in range(H)]
    best = np.full(t_max + 1, -np.inf)
    for lo in range(0, count, chunk):
        ids = np.arange(lo, min(lo + chunk, count))
        phi = _decode_base(ids, H * S * A, A).reshape(ids.size, H, S, A)
        v_next = np.zeros((ids.size, t_max + 1, S))
        for h in range(H - 1, -1, -1):
            r_view, p_view = views[h]
            cont = np.einsum("sbcx,ktx->ktsbc", p_view, v_next)
            target = r_view[None, None] + cont
            U = np.einsum("tsc,ktsbc->ktsb", others[h], target)
            g = np.take_along_axis(U, phi[:, h][:, None, :, :], axis=3)
            y = np.einsum("tsa,ktsa->kts", own[h], g)
            v_next = _prefix_mixture(y, C, D, axis=1)
        best = np.maximum(best, v_next[:, :, game.initial_index].max(axis=0))
    best[0] = 0.0
    return best


def markov_deviation_curve(
    game: MarkovGame, policies, t_max: int, player: int, chunk: int = _CHUNK
) -> np.ndarray:
    """(t_max+1,) best deterministic-Markov deviation value against the
    mixture certificate's opponents; slot 0 is zero."""
    _check_t(policies, t_max)
    count = markov_enumeration_count(game, player)
    if count > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"{count} Markov deviation policies exceed the guard ({ENUMERATION_GUARD})"
        )
    H, S = game.horizon, game.num_states
    A = game.action_counts[player]
    C, D = mixture_scan(t_max, H)
    others = [_others_curve(policies[h], player, t_max) for h in range(H)]
    views = [_own_views(game, h, player) for h in range(H)]
    best = np.full(t_max + 1, -np.inf)
    for lo in range(0, count, chunk):
        ids = np.arange(lo, min(lo + chunk, count))
        dpol = _decode_base(ids, H * S, A).reshape(ids.size, H, S)
        v_next = np.zeros((ids.size, t_max + 1, S))
        for h in range(H - 1, -1, -1):
            r_view, p_view = views[h]
            cont = np.einsum("sbcx,ktx->ktsbc", p_view, v_next)
            target = r_view[None, None] + cont
            W = np.einsum("tsc,ktsbc->ktsb", others[h], target)
            g = np.take_along_axis(W, dpol[:, h][:, None, :, None], axis=3)
            v_next = _prefix_mixture(g[..., 0], C, D, axis=1)
        best = np.maximum(best, v_next[:, :, game.initial_index].max(axis=0))
    best[0] = 0.0
    return best


# ---------------------------------------------------------------------------
# stage certificates (tables indexed by stage, not iteration)
# ---------------------------------------------------------------------------


def stage_certified_values(game: MarkovGame, policies, schedule: StageSchedule) -> np.ndarray:
    """(n_stages+1, N) root certified values per stage (slot 0 unused).
    Stage 1 is the uniform-product fallback; stage sigma >= 2 averages the
    previous stage's window and recurses into stage sigma-1."""
    H, N, S = game.horizon, game.num_players, game.num_states
    n = schedule.num_stages
    jp_curves = [_joint_curve(policies[h], schedule.total) for h in range(H)]
    jp_unif = np.full((S, game.joint_size), 1.0 / game.joint_size)
    V = np.zeros((H + 1, n + 1, S, N))
    for h in range(H - 1, -1, -1):
        tgt = game.rewards[h] + np.einsum("sax,xi->isa", game.transitions[h], V[h + 1][1])
        V[h][1] = np.einsum("sa,isa->si", jp_unif, tgt)
        for sigma in range(2, n + 1):
            a, b = schedule.starts[sigma - 2], schedule.ends[sigma - 2]
            jp_mean = jp_curves[h][a : b + 1].mean(axis=0)
            tgt = game.rewards[h] + np.einsum(
                "sax,xi->isa", game.transitions[h], V[h + 1][sigma - 1]
            )
            V[h][sigma] = np.einsum("sa,isa->si", jp_mean, tgt)
    return V[0][:, game.initial_index, :]


def stage_informed_upper(
    game: MarkovGame, policies, schedule: StageSchedule, player: int
) -> np.ndarray:
    """(n_stages+1,) root best-deviation values per stage (slot 0 unused).

    Every index in window W_{sigma-1} leads to the same continuation (uniform
    over W_{sigma-2}), so the sampled index reveals nothing about future play
    and the deviator faces a plain MDP against the window-mean opponents: the
    max over the own action sits outside the window mean, and the result is the
    exact best-response value for the stage certificate.
    """
    H, S = game.horizon, game.num_states
    n = schedule.num_stages
    views = [_own_views(game, h, player) for h in range(H)]
    obar = []
    for h in range(H):
        curve = _others_curve(policies[h], player, schedule.total)
        obar.append(
            [curve[a : b + 1].mean(axis=0) for a, b in zip(schedule.starts, schedule.ends)]
        )
    M = np.zeros((H + 1, n + 1, S))
    for h in range(H - 1, -1, -1):
        r_view, p_view = views[h]
        cont1 = np.einsum("sbcx,x->sbc", p_view, M[h + 1][1])
        M[h][1] = (r_view + cont1).mean(axis=2).max(axis=1)
        for sigma in range(2, n + 1):
            cont = np.einsum("sbcx,x->sbc", p_view, M[h + 1][sigma - 1])
            U = np.einsum("sc,sbc->sb", obar[h][sigma - 2], r_view + cont)
            M[h][sigma] = U.max(axis=1)
    return M[0][:, game.initial_index]


def stage_markov_lower(
    game: MarkovGame, policies, schedule: StageSchedule, player: int, chunk: int = 4096
) -> np.ndarray:
    """(n_stages+1,) best deterministic-Markov deviation values per stage."""
    count = markov_enumeration_count(game, player)
    if count > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"{count} Markov deviation policies exceed the guard ({ENUMERATION_GUARD})"
        )
    H, S = game.horizon, game.num_states
    A = game.action_counts[player]
    n = schedule.num_stages
    views = [_own_views(game, h, player) for h in range(H)]
    obar = []
    for h in range(H):
        curve = _others_curve(policies[h], player, schedule.total)
        obar.append(
            [curve[a : b + 1].mean(axis=0) for a, b in zip(schedule.starts, schedule.ends)]
        )
    best = np.full(n + 1, -np.inf)
    for lo in range(0, count, chunk):
        ids = np.arange(lo, min(lo + chunk, count))
        dpol = _decode_base(ids, H * S, A).reshape(ids.size, H, S)
        v_next = np.zeros((ids.size, n + 1, S))
        for h in range(H - 1, -1, -1):
            r_view, p_view = views[h]
            v_new = np.zeros_like(v_next)
            idx = dpol[:, h][:, :, None]
            cont1 = np.einsum("sbcx,kx->ksbc", p_view, v_next[:, 1])
            W1 = (r_view[None] + cont1).mean(axis=3)
            v_new[:, 1] = np.take_along_axis(W1, idx, axis=2)[..., 0]
            for sigma in range(2, n + 1):
                cont = np.einsum("sbcx,kx->ksbc", p_view, v_next[:, sigma - 1])
                W = np.einsum("sc,ksbc->ksb", obar[h][sigma - 2], r_view[None] + cont)
                v_new[:, sigma] = np.take_along_axis(W, idx, axis=2)[..., 0]
            v_next = v_new
        best = np.maximum(best, v_next[:, :, game.initial_index].max(axis=0))
    best[0] = 0.0
    return best


def _stage_overlap_counts(schedule: StageSchedule, t: int) -> np.ndarray:
    """Iterations of each stage inside [1, t]; shape (n_stages,)."""
    starts = np.asarray(schedule.starts)
    ends = np.asarray(schedule.ends)
    return np.maximum(0, np.minimum(ends, t) - starts + 1)


# ---------------------------------------------------------------------------
# per-iteration operations (thin wrappers over the batched curves)
# ---------------------------------------------------------------------------


def ce_gap_exact(game: MarkovGame, policies, t: int, player: int) -> float:
    """Exact swap-deviation gap of the mixture certificate at iteration t."""
    values = certified_value_ce(game, policies, t)[0][:, game.initial_index, player]
    curve = swap_deviation_curve(game, policies, t, player)
    return float(curve[t] - values[t])


def informed_deviation_gap(
    game: MarkovGame, policies, t: int, player: int, mode: str = "mixture", total: int | None = None
) -> float:
    """Index-informed deviation gap (upper bound on the true gap).

    mode "mixture" covers both smooth certificates; mode "stage" evaluates the
    stage certificate and needs `total` (run length) to rebuild the schedule;
    it rejects iterations in the first stage (no completed prior stage).
    """
    if mode == "mixture":
        values = certified_value_ce(game, policies, t)[0][:, game.initial_index, player]
        upper = informed_upper_table(game, policies, t, player)[0][:, game.initial_index]
        return float(upper[t] - values[t])
    if mode != "stage":
        raise ValueError(f"unknown mode {mode!r}")
    if total is None:
        raise ValueError("stage mode needs total=T to reconstruct the schedule")
    sched = stage_schedule(game.horizon, total)
    sigma = sched.stage_of(t)
    if sigma == 1:
        raise ValueError(f"iteration {t} has no completed prior stage")
    values = stage_certified_values(game, policies, sched)[:, player]
    upper = stage_informed_upper(game, policies, sched, player)
    return float(upper[sigma] - values[sigma])


def cce_markov_lower_bound(
    game: MarkovGame, policies, t: int, player: int, mode: str = "mixture", total: int | None = None
) -> float | None:
    """Best deterministic-Markov deviation gap (lower bound on the true gap);
    returns None when the enumeration guard trips."""
    if markov_enumeration_count(game, player) > ENUMERATION_GUARD:
        return None
    if mode == "mixture":
        values = certified_value_ce(game, policies, t)[0][:, game.initial_index, player]
        curve = markov_deviation_curve(game, policies, t, player)
        return float(curve[t] - values[t])
    if mode != "stage":
        raise ValueError(f"unknown mode {mode!r}")
    if total is None:
        raise ValueError("stage mode needs total=T to reconstruct the schedule")
    sched = stage_schedule(game.horizon, total)
    sigma = sched.stage_of(t)
    if sigma == 1:
        raise ValueError(f"iteration {t} has no completed prior stage")
    values = stage_certified_values(game, policies, sched)[:, player]
    lower = stage_markov_lower(game, policies, sched, player)
    return float(lower[sigma] - values[sigma])


def swap_regret_table(result: SmoothRunResult, t: int, h: int, s: int, player: int) -> float:
    """Per-state weighted swap regret at checkpoint t from the run's rolling
    snapshot tables; the max over modifications decomposes per recommendation."""
    if t not in result.swap_tables:
        raise KeyError(
            f"no swap-regret snapshot at t={t}; snapshots exist at {sorted(result.swap_tables)}"
        )
    G = result.swap_tables[t][h][player][s]
    return float(G.max(axis=1).sum() - np.trace(G))


def stage_avg_regret(result: StageRunResult, tau: int, h: int, s: int, player: int) -> float:
    """Per-state average external regret of completed stage tau, recomputed
    exactly from the trajectory and the stage's frozen value table."""
    sched = result.schedule
    if not 1 <= tau <= sched.num_stages:
        raise ValueError(f"stage {tau} outside 1..{sched.num_stages}")
    if sched.lengths[tau - 1] != sched.nominal_length(tau):
        raise ValueError(f"stage {tau} is truncated (incomplete)")
    game = result.game
    a, b = sched.starts[tau - 1], sched.ends[tau - 1]
    counts = game.action_counts
    a_own = counts[player]
    q_view = result.stage_q[tau - 1, h, player].reshape(game.num_states, *counts)
    q_view = np.moveaxis(q_view, 1 + player, 1).reshape(game.num_states, a_own, -1)[s]
    others = _others_curve(result.policies[h], player, b)[a : b + 1, s]
    own = result.policies[h][player][a : b + 1, s]
    U = others @ q_view.T  # (L, A_own)
    return float(U.mean(axis=0).max() - (own * U).sum(axis=1).mean())


# ---------------------------------------------------------------------------
# checkpoint reports
# ---------------------------------------------------------------------------


@dataclass
class PlayerGapReport:
    """Per-player metrics at one checkpoint; None marks a tripped guard."""

    player: int  # 0-based
    value_certified: float
    gap_upper: float
    gap_reported: float
    gap_exact: float | None = None
    gap_lower: float | None = None
    swapreg_max: float | None = None
    stagereg_max: float | None = None


@dataclass
class GapReport:
    """All players' metrics at one checkpoint."""

    checkpoint: int
    players: list[PlayerGapReport] = field(default_factory=list)
    uniform_fallback_count: int = 0

    def max_gap_reported(self) -> float:
        return max(p.gap_reported for p in self.players)

    def max_gap_upper(self) -> float:
        return max(p.gap_upper for p in self.players)


def _swapreg_max(result: SmoothRunResult, t: int, player: int) -> float:
    tables = result.swap_tables[t]
    worst = -np.inf
    for h in range(result.game.horizon):
        G = tables[h][player]
        per_state = G.max(axis=2).sum(axis=1) - np.trace(G, axis1=1, axis2=2)
        worst = max(worst, float(per_state.max()))
    return worst


def _stagereg_max(result: StageRunResult, tau: int, player: int) -> float:
    game = result.game
    worst = -np.inf
    for h in range(game.horizon):
        for s in range(game.num_states):
            worst = max(worst, stage_avg_regret(result, tau, h, s, player))
    return worst


def _evaluate_smooth(result: SmoothRunResult, diagnostics: bool) -> list[GapReport]:
    game = result.game
    t_max = max(result.checkpoints)
    values = certified_value_ce(game, result.policies, t_max)[0][:, game.initial_index, :]
    is_ce = result.algo == "ce_smooth"
    exact_curves: dict[int, np.ndarray | None] = {}
    lower_curves: dict[int, np.ndarray | None] = {}
    upper_curves: dict[int, np.ndarray] = {}
    for i in range(game.num_players):
        upper = informed_upper_table(game, result.policies, t_max, i)[0][:, game.initial_index]
        upper_curves[i] = upper - values[:, i]
        if is_ce and swap_enumeration_count(game, i) <= ENUMERATION_GUARD:
            exact_curves[i] = (
                swap_deviation_curve(game, result.policies, t_max, i) - values[:, i]
            )
        else:
            exact_curves[i] = None
        if markov_enumeration_count(game, i) <= ENUMERATION_GUARD:
            lower_curves[i] = (
                markov_deviation_curve(game, result.policies, t_max, i) - values[:, i]
            )
        else:
            lower_curves[i] = None
    reports = []
    for t in result.checkpoints:
        report = GapReport(checkpoint=t)
        for i in range(game.num_players):
            exact = None if exact_curves[i] is None else float(exact_curves[i][t])
            lower = None if lower_curves[i] is None else float(lower_curves[i][t])
            upper = float(upper_curves[i][t])
            if is_ce:
                reported = exact if exact is not None else upper
            else:
                reported = upper
            entry = PlayerGapReport(
                player=i,
                value_certified=float(values[t, i]),
                gap_upper=upper,
                gap_reported=reported,
                gap_exact=exact if is_ce else None,
                gap_lower=lower,
            )
            if diagnostics and is_ce and t in result.swap_tables:
                entry.swapreg_max = _swapreg_max(result, t, i)
            report.players.append(entry)
        reports.append(report)
    return reports


def _evaluate_stage(result: StageRunResult, diagnostics: bool) -> list[GapReport]:
    game = result.game
    sched = result.schedule
    values = stage_certified_values(game, result.policies, sched)  # (n+1, N)
    n = sched.num_stages
    uppers = np.zeros((n + 1, game.num_players))
    lowers: dict[int, np.ndarray | None] = {}
    for i in range(game.num_players):
        uppers[:, i] = stage_informed_upper(game, result.policies, sched, i) - values[:, i]
        if markov_enumeration_count(game, i) <= ENUMERATION_GUARD:
            lowers[i] = stage_markov_lower(game, result.policies, sched, i) - values[:, i]
        else:
            lowers[i] = None
    completed_ends = [
        sched.ends[k]
        for k in range(n)
        if sched.lengths[k] == sched.nominal_length(k + 1)
    ]
    reports = []
    for t in result.checkpoints:
        counts = _stage_overlap_counts(sched, t)
        report = GapReport(checkpoint=t, uniform_fallback_count=int(counts[0]))
        last_complete = max(
            (k + 1 for k in range(n) if sched.ends[k] <= t and sched.ends[k] in completed_ends),
            default=None,
        )
        for i in range(game.num_players):
            value = float(counts @ values[1:, i] / t)
            upper = float(counts @ uppers[1:, i] / t)
            lower = None if lowers[i] is None else float(counts @ lowers[i][1:] / t)
            entry = PlayerGapReport(
                player=i,
                value_certified=value,
                gap_upper=upper,
                gap_reported=upper,
                gap_lower=lower,
            )
            if diagnostics and last_complete is not None:
                entry.stagereg_max = _stagereg_max(result, last_complete, i)
            report.players.append(entry)
        reports.append(report)
    return reports


def evaluate_run(result, diagnostics: bool = False) -> list[GapReport]:
    """GapReports at the run's checkpoints; dispatches on the result kind."""
    if isinstance(result, StageRunResult):
        return _evaluate_stage(result, diagnostics)
    if isinstance(result, SmoothRunResult):
        return _evaluate_smooth(result, diagnostics)
    raise TypeError(f"unsupported run result type {type(result).__name__}")
