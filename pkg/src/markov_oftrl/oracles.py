"""Deliberately naive reference implementations used only for verification.

Everything here recomputes quantities from first principles with plain Python
loops and recursion (no shared code with the evaluator or the dynamics):

  * unrolled-tree enumeration of certified-policy values, exact swap-deviation
    values, index-informed deviation values and fixed-Markov-deviation values,
    for both certificate kinds (iteration-mixture and stage-uniform);
  * a projected-gradient solver for the log-barrier simplex argmax.

These are exponential-time and meant for tiny inputs (S, H, A_i <= 2, T <= 3
in the equivalence suite). The acceptance suite and tests compare the real
code paths against them.
"""

from __future__ import annotations

import itertools

import numpy as np


# ---------------------------------------------------------------------------
# schedule pieces, re-derived locally
# ---------------------------------------------------------------------------


def _alpha(t: int, horizon: int) -> float:
    return (horizon + 1) / (horizon + t)


def alpha_profile(t: int, horizon: int) -> list[float]:
    """[alpha_t^1 .. alpha_t^t] straight from the product definition."""
    out = []
    for j in range(1, t + 1):
        c = _alpha(j, horizon)
        for k in range(j + 1, t + 1):
            c *= 1.0 - _alpha(k, horizon)
        out.append(c)
    return out


def stage_windows(horizon: int, total: int) -> list[tuple[int, int]]:
    """Inclusive 1-based (start, end) stage windows; L_1 = H, L += floor growth."""
    wins = []
    t, L = 1, horizon
    while t <= total:
        end = min(t + L - 1, total)
        wins.append((t, end))
        t = end + 1
        L += L // horizon  # floor((1 + 1/H) L), exact
    return wins


def _stage_of(wins: list[tuple[int, int]], t: int) -> int:
    for k, (a, b) in enumerate(wins):
        if a <= t <= b:
            return k + 1
    raise ValueError(f"iteration {t} outside all stage windows")


# ---------------------------------------------------------------------------
# joint-action helpers (independent arithmetic)
# ---------------------------------------------------------------------------


def _joints(counts):
    for joint in itertools.product(*[range(c) for c in counts]):
        flat = 0
        for a, c in zip(joint, counts):
            flat = flat * c + a
        yield joint, flat


def _joint_prob(pols, h, j, s, joint, skip=None):
    p = 1.0
    for k, a in enumerate(joint):
        if k == skip:
            continue
        p *= pols[h][k][j][s][a]
    return p


def _replace(joint, player, action):
    out = list(joint)
    out[player] = action
    return tuple(out)


def _flat(joint, counts) -> int:
    flat = 0
    for a, c in zip(joint, counts):
        flat = flat * c + a
    return flat


# ---------------------------------------------------------------------------
# iteration-mixture certificate (resample j ~ alpha_t^j at every step)
# ---------------------------------------------------------------------------


def tree_value_mixture(game, pols, t: int, player: int, modification=None) -> float:
    """Value at (h=1, s_init) of the mixture certificate, optionally with the
    given player's recommendations rewired by modification[h][s][a_i]."""
    H = game.horizon
    counts = game.action_counts

    def val(h, idx, s):
        if h == H:
            return 0.0
        prof = alpha_profile(idx, H)
        total = 0.0
        for j, w in enumerate(prof, start=1):
            for joint, flat in _joints(counts):
                p = _joint_prob(pols, h, j, s, joint)
                if p == 0.0:
                    continue
                played = joint
                if modification is not None:
                    played = _replace(joint, player, modification[h][s][joint[player]])
                pf = _flat(played, counts)
                r = game.rewards[h, player, s, pf]
                cont = 0.0
                for s2 in range(game.num_states):
                    pr = game.transitions[h, s, pf, s2]
                    if pr:
                        cont += pr * val(h + 1, j, s2)
                total += w * p * (r + cont)
        return total

    return val(0, t, game.initial_index)


def tree_best_modification_mixture(game, pols, t: int, player: int) -> float:
    """Max over all strategy modifications of the modified certificate value."""
    H, S = game.horizon, game.num_states
    A = game.action_counts[player]
    best = -np.inf
    slots = H * S * A
    for combo in itertools.product(range(A), repeat=slots):
        it = iter(combo)
        mod = [[[next(it) for _ in range(A)] for _ in range(S)] for _ in range(H)]
        best = max(best, tree_value_mixture(game, pols, t, player, mod))
    return best


def tree_informed_best_mixture(game, pols, t: int, player: int) -> float:
    """Deviation value when the deviator observes every sampled index."""
    H = game.horizon
    counts = game.action_counts

    def val(h, idx, s):
        if h == H:
            return 0.0
        prof = alpha_profile(idx, H)
        total = 0.0
        for j, w in enumerate(prof, start=1):
            best = -np.inf
            for a_dev in range(counts[player]):
                acc = 0.0
                for joint, _ in _joints(counts):
                    if joint[player] != a_dev:
                        continue
                    p = _joint_prob(pols, h, j, s, joint, skip=player)
                    if p == 0.0:
                        continue
                    flat = _flat(joint, counts)
                    r = game.rewards[h, player, s, flat]
                    cont = 0.0
                    for s2 in range(game.num_states):
                        pr = game.transitions[h, s, flat, s2]
                        if pr:
                            cont += pr * val(h + 1, j, s2)
                    acc += p * (r + cont)
                best = max(best, acc)
            total += w * best
        return total

    return val(0, t, game.initial_index)


def tree_markov_best_mixture(game, pols, t: int, player: int) -> float:
    """Max over deterministic Markov deviation policies of their value against
    the mixture certificate's opponents."""
    H, S = game.horizon, game.num_states
    counts = game.action_counts

    def val(d, h, idx, s):
        if h == H:
            return 0.0
        prof = alpha_profile(idx, H)
        total = 0.0
        for j, w in enumerate(prof, start=1):
            for joint, _ in _joints(counts):
                if joint[player] != d[h][s]:
                    continue
                p = _joint_prob(pols, h, j, s, joint, skip=player)
                if p == 0.0:
                    continue
                flat = _flat(joint, counts)
                r = game.rewards[h, player, s, flat]
                cont = 0.0
                for s2 in range(game.num_states):
                    pr = game.transitions[h, s, flat, s2]
                    if pr:
                        cont += pr * val(d, h + 1, j, s2)
                total += w * p * (r + cont)
        return total

    best = -np.inf
    for combo in itertools.product(range(counts[player]), repeat=H * S):
        it = iter(combo)
        d = [[next(it) for _ in range(S)] for _ in range(H)]
        best = max(best, val(d, 0, t, game.initial_index))
    return best


# ---------------------------------------------------------------------------
# stage-uniform certificate (sample j uniformly from the previous stage;
# iterations in stage 1 fall back to uniform product play)
# ---------------------------------------------------------------------------


def _uniform_value(game, h, s, player, own=None):
    """Uniform product play from (h, s); `own` optionally fixes this player's
    deterministic Markov policy d[h][s]."""
    if h == game.horizon:
        return 0.0
    counts = game.action_counts
    total = 0.0
    for joint, flat in _joints(counts):
        if own is not None and joint[player] != own[h][s]:
            continue
        p = 1.0
        for k, c in enumerate(counts):
            if own is not None and k == player:
                continue
            p *= 1.0 / c
        r = game.rewards[h, player, s, flat]
        cont = 0.0
        for s2 in range(game.num_states):
            pr = game.transitions[h, s, flat, s2]
            if pr:
                cont += pr * _uniform_value(game, h + 1, s2, player, own)
        total += p * (r + cont)
    return total


def _uniform_best_response(game, h, s, player):
    if h == game.horizon:
        return 0.0
    counts = game.action_counts
    best = -np.inf
    for a_dev in range(counts[player]):
        acc = 0.0
        for joint, flat in _joints(counts):
            if joint[player] != a_dev:
                continue
            p = 1.0
            for k, c in enumerate(counts):
                if k == player:
                    continue
                p *= 1.0 / c
            r = game.rewards[h, player, s, flat]
            cont = 0.0
            for s2 in range(game.num_states):
                pr = game.transitions[h, s, flat, s2]
                if pr:
                    cont += pr * _uniform_best_response(game, h + 1, s2, player)
            acc += p * (r + cont)
        best = max(best, acc)
    return best


def tree_value_stage(game, pols, t: int, total: int, player: int) -> float:
    H = game.horizon
    counts = game.action_counts
    wins = stage_windows(H, total)

    def val(h, idx, s):
        if h == H:
            return 0.0
        stage = _stage_of(wins, idx)
        if stage == 1:
            return _uniform_value(game, h, s, player)
        a, b = wins[stage - 2]
        total_v = 0.0
        for j in range(a, b + 1):
            for joint, flat in _joints(counts):
                p = _joint_prob(pols, h, j, s, joint)
                if p == 0.0:
                    continue
                r = game.rewards[h, player, s, flat]
                cont = 0.0
                for s2 in range(game.num_states):
                    pr = game.transitions[h, s, flat, s2]
                    if pr:
                        cont += pr * val(h + 1, j, s2)
                total_v += p * (r + cont)
        return total_v / (b - a + 1)

    return val(0, t, game.initial_index)


def tree_informed_best_stage(game, pols, t: int, total: int, player: int) -> float:
    """Best-response value against the stage certificate rooted at iteration t.

    The deviator's own action at step h maximizes the average over the sampled
    window index (the max sits outside the window mean: the realized index is
    never revealed and all indices share the same continuation distribution),
    which makes this the exact best-response value.
    """
    H = game.horizon
    counts = game.action_counts
    wins = stage_windows(H, total)

    def val(h, idx, s):
        if h == H:
            return 0.0
        stage = _stage_of(wins, idx)
        if stage == 1:
            return _uniform_best_response(game, h, s, player)
        a, b = wins[stage - 2]
        best = -np.inf
        for a_dev in range(counts[player]):
            acc = 0.0
            for j in range(a, b + 1):
                for joint, _ in _joints(counts):
                    if joint[player] != a_dev:
                        continue
                    p = _joint_prob(pols, h, j, s, joint, skip=player)
                    if p == 0.0:
                        continue
                    flat = _flat(joint, counts)
                    r = game.rewards[h, player, s, flat]
                    cont = 0.0
                    for s2 in range(game.num_states):
                        pr = game.transitions[h, s, flat, s2]
                        if pr:
                            cont += pr * val(h + 1, j, s2)
                    acc += p * (r + cont)
            best = max(best, acc / (b - a + 1))
        return best

    return val(0, t, game.initial_index)


def tree_markov_best_stage(game, pols, t: int, total: int, player: int) -> float:
    H, S = game.horizon, game.num_states
    counts = game.action_counts
    wins = stage_windows(H, total)

    def val(d, h, idx, s):
        if h == H:
            return 0.0
        stage = _stage_of(wins, idx)
        if stage == 1:
            return _uniform_value(game, h, s, player, own=d)
        a, b = wins[stage - 2]
        total_v = 0.0
        for j in range(a, b + 1):
            for joint, _ in _joints(counts):
                if joint[player] != d[h][s]:
                    continue
                p = _joint_prob(pols, h, j, s, joint, skip=player)
                if p == 0.0:
                    continue
                flat = _flat(joint, counts)
                r = game.rewards[h, player, s, flat]
                cont = 0.0
                for s2 in range(game.num_states):
                    pr = game.transitions[h, s, flat, s2]
                    if pr:
                        cont += pr * val(d, h + 1, j, s2)
                total_v += p * (r + cont)
        return total_v / (b - a + 1)

    best = -np.inf
    for combo in itertools.product(range(counts[player]), repeat=H * S):
        it = iter(combo)
        d = [[next(it) for _ in range(S)] for _ in range(H)]
        best = max(best, val(d, 0, t, game.initial_index))
    return best


# ---------------------------------------------------------------------------
# projected-gradient oracle for the log-barrier argmax
# ---------------------------------------------------------------------------


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(v - theta, 0.0)


def pgd_logbarrier_max(g: np.ndarray, scale: float, max_iter: int = 200000) -> np.ndarray:
    """Maximize scale*<x, g> + sum log x over the simplex by fixed-step
    projected gradient ascent, iterated to a machine-precision fixed point.

    Every optimal coordinate satisfies x_a = 1/(lam - scale*g_a) with
    lam <= max(scale*g) + dim, so x_a >= x_lo below; a step of x_lo^2/2 is
    safely inside 1/L for the curvature 1/x^2 near the optimum and makes the
    update a contraction, avoiding the sqrt(eps) plateau of objective-based
    line searches.
    """
    g = np.asarray(g, dtype=np.float64)
    dim = g.size
    if dim == 1:
        return np.ones(1)
    z = scale * g
    x_lo = 1.0 / (float(z.max() - z.min()) + dim)
    step = 0.5 * x_lo * x_lo
    floor = 0.1 * x_lo
    x = np.full(dim, 1.0 / dim)
    for _ in range(max_iter):
        y = project_to_simplex(x + step * (z + 1.0 / x))
        if np.any(y < floor):
            y = np.maximum(y, floor)
            y = y / y.sum()
        moved = float(np.abs(y - x).max())
        x = y
        if moved < 1e-15:
            break
    return x
