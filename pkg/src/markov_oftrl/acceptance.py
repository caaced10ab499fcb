"""Acceptance suite: every release-gating criterion with measured evidence.

Each criterion is a named function returning (ok, detail). The suite shares
one AcceptanceContext so the expensive reproduction runs (toy game, eta = 0.2,
T = 2^14, all three algorithms) and the guarantee-rate runs are executed once.
``run_acceptance`` prints one PASS/FAIL line per criterion; the CLI exposes it
as the ``accept`` subcommand and the test suite runs every criterion as a
separate test.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from markov_oftrl import cli, gap_eval, oracles, solvers
from markov_oftrl.cce_dynamics import run_cce_smooth, run_cce_stage
from markov_oftrl.ce_dynamics import run_ce, theory_eta_smooth
from markov_oftrl.games import MarkovGame, toy_game, validate
from markov_oftrl.schedules import (
    mixture_weight_sums,
    mixture_weights,
    oftrl_weight,
    stage_count_bound,
    stage_schedule,
)

T_MAIN = 2**14
T_THEORY_CE = 2**10
T_THEORY_STAGE = 2**12
MAIN_ETA = 0.2
_ALGOS = ("ce_smooth", "cce_stage", "cce_smooth")


@dataclass
class AcceptanceContext:
    """Lazily built shared state for the criteria."""

    _cache: dict = field(default_factory=dict)

    def game(self) -> MarkovGame:
        if "game" not in self._cache:
            self._cache["game"] = toy_game()
        return self._cache["game"]

    def main_run(self, algo: str):
        key = ("main", algo)
        if key not in self._cache:
            game = self.game()
            if algo == "ce_smooth":
                result = run_ce(game, T_MAIN, MAIN_ETA)
            elif algo == "cce_smooth":
                result = run_cce_smooth(game, T_MAIN, MAIN_ETA)
            else:
                result = run_cce_stage(game, T_MAIN, eta=MAIN_ETA)
            self._cache[key] = (result, gap_eval.evaluate_run(result))
        return self._cache[key]

    def theory_ce_run(self):
        if "theory_ce" not in self._cache:
            game = self.game()
            result = run_ce(game, T_THEORY_CE, theory_eta_smooth(game), eta_mode="theory")
            self._cache["theory_ce"] = (result, gap_eval.evaluate_run(result))
        return self._cache["theory_ce"]

    def theory_stage_run(self):
        if "theory_stage" not in self._cache:
            game = self.game()
            result = run_cce_stage(game, T_THEORY_STAGE, eta_mode="theory", theory_c=1.0)
            self._cache["theory_stage"] = (result, gap_eval.evaluate_run(result))
        return self._cache["theory_stage"]


# ---------------------------------------------------------------------------
# criterion: toy-game fixtures
# ---------------------------------------------------------------------------


def check_toy_game_fixtures(ctx: AcceptanceContext):
    game = ctx.game()
    expected_r1 = {0: [0.8, 0.2, 0.0, 1.0], 1: [1.0, 0.2, 0.5, 0.8]}
    expected_r2 = {0: [0.2, 1.0, 0.5, 0.0], 1: [0.5, 1.0, 1.0, 0.2]}
    for h in range(2):
        for s in range(2):
            if not np.array_equal(game.rewards[h, 0, s], expected_r1[s]):
                return False, f"player-1 rewards at h={h + 1}, s={s} differ from the fixture"
            if not np.array_equal(game.rewards[h, 1, s], expected_r2[s]):
                return False, f"player-2 rewards at h={h + 1}, s={s} differ from the fixture"
    for h in range(2):
        for s in range(2):
            for a in range(4):
                own, opp = divmod(a, 2)
                stay = 0.8 if own == opp else 0.2
                if game.transitions[h, s, a, s] != stay:
                    return False, f"stay probability at h={h + 1}, s={s}, a={a} is not {stay}"
                if game.transitions[h, s, a, 1 - s] != 1.0 - stay:
                    return False, f"move probability at h={h + 1}, s={s}, a={a} is not {1 - stay}"
    if game.initial_state != "s0":
        return False, "initial state is not s0"
    report = validate(game)
    if not report.ok:
        return False, f"toy game fails validation: {report.violations[0]}"
    # a deliberately broken variant must be flagged at the right coordinates
    bad_t = np.array(game.transitions)
    bad_t[0, 1, 2] *= 0.9
    broken = MarkovGame(
        horizon=2,
        states=game.states,
        action_names=game.action_names,
        initial_state="s0",
        rewards=game.rewards,
        transitions=bad_t,
    )
    bad_report = validate(broken)
    if bad_report.ok or "h=1" not in str(bad_report.violations[0]):
        return False, "validator missed a transition row scaled to 0.9"
    return True, "reward tables, transition kernel, initial state, and validator all match"


# ---------------------------------------------------------------------------
# criterion: kernels
# ---------------------------------------------------------------------------


def check_kernels_logbarrier(ctx: AcceptanceContext):
    rng = np.random.default_rng(52081)
    worst_kkt = 0.0
    worst_pgd = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 7))
        g = rng.uniform(-10.0, 10.0, size=dim)
        scale = float(rng.uniform(0.05, 1.0))
        x = solvers.logbarrier_argmax(g, scale)
        # stationarity: scale*g_a + 1/x_a must be one shared multiplier;
        # feasibility: x on the simplex
        lam = scale * g + 1.0 / x
        worst_kkt = max(
            worst_kkt,
            abs(float(x.sum()) - 1.0),
            float(lam.max() - lam.min()) / (1.0 + float(np.abs(lam).max())),
        )
        ref = oracles.pgd_logbarrier_max(g, scale)
        worst_pgd = max(worst_pgd, float(np.abs(x - ref).max()))
    ok = worst_kkt < 1e-12 and worst_pgd < 1e-8
    return ok, f"KKT residual max {worst_kkt:.3e} (<1e-12), PGD deviation max {worst_pgd:.3e} (<1e-8)"


def check_kernels_stationary(ctx: AcceptanceContext):
    rng = np.random.default_rng(90714)
    worst = 0.0
    for _ in range(100):
        dim = int(rng.integers(1, 9))
        q = rng.random((dim, dim)) + 1e-3
        q /= q.sum(axis=1, keepdims=True)
        pi = solvers.stationary_distribution(q)
        resid = float(np.abs(q.T @ pi - pi).max())
        worst = max(worst, resid, abs(float(pi.sum()) - 1.0))
        if np.any(pi < -1e-15):
            return False, "stationary distribution has a negative entry"
    return worst < 1e-10, f"max stationary residual {worst:.3e} (<1e-10) over 100 matrices"


def check_kernels_schedules(ctx: AcceptanceContext):
    horizons = (1, 2, 3, 5, 10)
    worst_sum = 0.0
    for H in horizons:
        sums = mixture_weight_sums(10**5, H)
        worst_sum = max(worst_sum, float(np.abs(sums[1:] - 1.0).max()))
    if worst_sum >= 1e-10:
        return False, f"mixture sum deviates by {worst_sum:.3e} (>=1e-10)"
    rng = np.random.default_rng(33190)
    worst_w = 0.0
    for _ in range(12):
        H = int(rng.choice(horizons))
        t = int(rng.integers(2, 2001))
        prof = mixture_weights(t, H)
        for j in rng.integers(1, t + 1, size=20):
            w = oftrl_weight(int(j), H)
            worst_w = max(worst_w, abs(w - prof[j - 1] / prof[0]) / w)
    if worst_w >= 1e-9:
        return False, f"weight t-independence deviates by {worst_w:.3e} (>=1e-9)"
    for H in horizons:
        for t in (1, 2, 7, 64, 511, 2000):
            p = mixture_weights(t, H)
            if p[0] > 1.0 / t + 1e-15:
                return False, f"alpha_t^1 = {p[0]!r} exceeds 1/t at t={t}, H={H}"
    lengths = [stage_schedule(2, 40).lengths, stage_schedule(1, 15).lengths]
    if lengths[0][:5] != (2, 3, 4, 6, 9) or lengths[1][:4] != (1, 2, 4, 8):
        return False, f"stage lengths wrong: {lengths}"
    sched = stage_schedule(2, 10)
    if sched.starts != (1, 3, 6, 10) or sched.ends != (2, 5, 9, 10):
        return False, f"stage boundaries wrong for H=2, T=10: {sched.starts}, {sched.ends}"
    for H in horizons:
        for T in (1, 2, 5, 17, 300, 4096, 10**5):
            n = stage_schedule(H, T).num_stages
            if n > stage_count_bound(H, T):
                return False, f"stage count {n} exceeds bound at H={H}, T={T}"
    return True, (
        f"mixture sums within {worst_sum:.3e}, weight ratios within {worst_w:.3e}, "
        "stage lengths/boundaries/count bound all hold"
    )


# ---------------------------------------------------------------------------
# criterion: oracle equivalence
# ---------------------------------------------------------------------------


def _random_small_game(rng) -> MarkovGame:
    H = int(rng.integers(1, 3))
    S = int(rng.integers(1, 3))
    counts = tuple(int(rng.integers(1, 3)) for _ in range(2))
    joint = int(np.prod(counts))
    rewards = rng.random((H, 2, S, joint))
    raw = rng.random((H, S, joint, S)) + 0.05
    transitions = raw / raw.sum(axis=-1, keepdims=True)
    states = tuple(f"s{k}" for k in range(S))
    return MarkovGame(
        horizon=H,
        states=states,
        action_names=tuple(tuple(f"x{a}" for a in range(c)) for c in counts),
        initial_state=states[int(rng.integers(0, S))],
        rewards=rewards,
        transitions=transitions,
    )


def _zero_game() -> MarkovGame:
    S, H, joint = 2, 2, 4
    return MarkovGame(
        horizon=H,
        states=("s0", "s1"),
        action_names=(("a0", "a1"), ("b0", "b1")),
        initial_state="s0",
        rewards=np.zeros((H, 2, S, joint)),
        transitions=np.full((H, S, joint, S), 0.5),
    )


def _three_player_game(rng) -> MarkovGame:
    counts = (2, 1, 2)
    joint = 4
    rewards = rng.random((1, 3, 2, joint))
    raw = rng.random((1, 2, joint, 2)) + 0.05
    return MarkovGame(
        horizon=1,
        states=("s0", "s1"),
        action_names=tuple(tuple(f"x{a}" for a in range(c)) for c in counts),
        initial_state="s1",
        rewards=rewards,
        transitions=raw / raw.sum(axis=-1, keepdims=True),
    )


def _naive_utility(game, policies, q_slice, h, j, s, player):
    """u(b) = sum over joint actions with own action b of others' product
    probability times Q(s, joint); plain loops."""
    u = np.zeros(game.action_counts[player])
    for joint, flat in oracles._joints(game.action_counts):
        p = 1.0
        for k, a in enumerate(joint):
            if k == player:
                continue
            p *= policies[h][k][j][s][a]
        u[joint[player]] += p * q_slice[s, flat]
    return u


def _naive_swap_regret(game, result, t, h, s, player):
    prof = oracles.alpha_profile(t, game.horizon)
    A = game.action_counts[player]
    G = np.zeros((A, A))
    for j, w in enumerate(prof, start=1):
        u = _naive_utility(game, result.policies, result.q_checkpoints[j][h, player], h, j, s, player)
        G += w * np.outer(result.policies[h][player][j][s], u)
    return float(G.max(axis=1).sum() - np.trace(G))


def _naive_stage_regret(game, result, tau, h, s, player):
    a, b = result.schedule.starts[tau - 1], result.schedule.ends[tau - 1]
    A = game.action_counts[player]
    usum = np.zeros(A)
    played = 0.0
    for j in range(a, b + 1):
        u = _naive_utility(game, result.policies, result.stage_q[tau - 1][h, player], h, j, s, player)
        usum += u
        played += float(result.policies[h][player][j][s] @ u)
    L = b - a + 1
    return float(usum.max() / L - played / L)


def check_oracle_equivalence(ctx: AcceptanceContext):
    rng = np.random.default_rng(77113)
    games = [ctx.game(), _zero_game(), _three_player_game(rng)]
    games += [_random_small_game(rng) for _ in range(20)]
    tol = 1e-9
    worst = 0.0
    cps = (1, 2, 3)

    for gi, game in enumerate(games):
        ce = run_ce(game, 3, 0.3, checkpoints=cps)
        sm = run_cce_smooth(game, 3, 0.4, checkpoints=cps)
        st = run_cce_stage(game, 3, eta=0.5, checkpoints=cps)
        sched = st.schedule
        stage_vals = gap_eval.stage_certified_values(game, st.policies, sched)
        stage_up = {}
        stage_lo = {}
        for i in range(game.num_players):
            stage_up[i] = gap_eval.stage_informed_upper(game, st.policies, sched, i)
            stage_lo[i] = gap_eval.stage_markov_lower(game, st.policies, sched, i)
        for res, kind in ((ce, "mixture"), (sm, "mixture"), (st, "stage")):
            for t in cps:
                for i in range(game.num_players):
                    if kind == "mixture":
                        table = gap_eval.certified_value_ce(game, res.policies, t)
                        val = table[0][t, game.initial_index, i]
                        ref = oracles.tree_value_mixture(game, res.policies, t, i)
                        upper = gap_eval.informed_upper_table(game, res.policies, t, i)[0][
                            t, game.initial_index
                        ]
                        ref_up = oracles.tree_informed_best_mixture(game, res.policies, t, i)
                        lower = gap_eval.markov_deviation_curve(game, res.policies, t, i)[t]
                        ref_lo = oracles.tree_markov_best_mixture(game, res.policies, t, i)
                    else:
                        sigma = sched.stage_of(t)
                        val = stage_vals[sigma, i]
                        ref = oracles.tree_value_stage(game, res.policies, t, 3, i)
                        upper = stage_up[i][sigma]
                        ref_up = oracles.tree_informed_best_stage(game, res.policies, t, 3, i)
                        lower = stage_lo[i][sigma]
                        ref_lo = oracles.tree_markov_best_stage(game, res.policies, t, 3, i)
                    for got, want in ((val, ref), (upper, ref_up), (lower, ref_lo)):
                        err = abs(float(got) - want)
                        worst = max(worst, err)
                        if err > tol:
                            return False, (
                                f"game {gi} ({kind}) t={t} player {i + 1}: "
                                f"evaluator {float(got)!r} vs oracle {want!r}"
                            )
        # exact swap enumeration against the unrolled tree (swap certificates)
        for t in cps:
            for i in range(game.num_players):
                got = gap_eval.swap_deviation_curve(game, ce.policies, t, i)[t]
                want = oracles.tree_best_modification_mixture(game, ce.policies, t, i)
                err = abs(float(got) - want)
                worst = max(worst, err)
                if err > tol:
                    return False, f"game {gi} swap enumeration t={t} player {i + 1}: {err:.2e}"
                for h in range(game.horizon):
                    for s in range(game.num_states):
                        got_sr = gap_eval.swap_regret_table(ce, t, h, s, i)
                        want_sr = _naive_swap_regret(game, ce, t, h, s, i)
                        err = abs(got_sr - want_sr)
                        worst = max(worst, err)
                        if err > tol:
                            return False, f"game {gi} swap-regret table t={t}: {err:.2e}"
        for tau in range(1, sched.num_stages + 1):
            if sched.lengths[tau - 1] != sched.nominal_length(tau):
                continue
            for i in range(game.num_players):
                for h in range(game.horizon):
                    for s in range(game.num_states):
                        got_sg = gap_eval.stage_avg_regret(st, tau, h, s, i)
                        want_sg = _naive_stage_regret(game, st, tau, h, s, i)
                        err = abs(got_sg - want_sg)
                        worst = max(worst, err)
                        if err > tol:
                            return False, f"game {gi} stage-regret tau={tau}: {err:.2e}"
    return True, f"23 games x 3 certificates x t<=3 agree with the tree oracles (max err {worst:.2e})"


# ---------------------------------------------------------------------------
# criteria on the reproduction runs
# ---------------------------------------------------------------------------


def check_swap_regret_nonneg(ctx: AcceptanceContext):
    result, _ = ctx.main_run("ce_smooth")
    game = result.game
    worst = np.inf
    for t in result.checkpoints:
        for h in range(game.horizon):
            for i in range(game.num_players):
                G = result.swap_tables[t][h][i]
                per_state = G.max(axis=2).sum(axis=1) - np.trace(G, axis1=1, axis2=2)
                worst = min(worst, float(per_state.min()))
    return worst >= -1e-9, f"min swap regret over all (t,h,s,i) = {worst:.3e} (>= -1e-9)"


def check_value_identity(ctx: AcceptanceContext):
    result, _ = ctx.main_run("ce_smooth")
    game = result.game
    t_max = max(result.checkpoints)
    V = gap_eval.certified_value_ce(game, result.policies, t_max)
    worst = 0.0
    for t in result.checkpoints:
        q = result.q_checkpoints[t]
        for h in range(game.horizon):
            cont = np.einsum("sax,xi->isa", game.transitions[h], V[h + 1][t])
            target = game.rewards[h] + cont
            worst = max(worst, float(np.abs(q[h] - target).max()))
    return worst < 1e-8, f"max |Q^t - (r + P V[h+1][t])| = {worst:.3e} (<1e-8) at all checkpoints"


def check_bound_ordering(ctx: AcceptanceContext):
    game = ctx.game()
    H = game.horizon
    msgs = []
    ok = True
    for algo in _ALGOS:
        _, reports = ctx.main_run(algo)
        for rep in reports:
            for p in rep.players:
                trip = (p.gap_lower, p.gap_exact, p.gap_upper)
                if p.gap_lower is not None and p.gap_lower > p.gap_upper + 1e-9:
                    ok = False
                    msgs.append(f"{algo} t={rep.checkpoint}: lower>upper {trip}")
                if p.gap_exact is not None:
                    if p.gap_exact > p.gap_upper + 1e-9:
                        ok = False
                        msgs.append(f"{algo} t={rep.checkpoint}: exact>upper {trip}")
                    if p.gap_lower is not None and p.gap_lower > p.gap_exact + 1e-9:
                        ok = False
                        msgs.append(f"{algo} t={rep.checkpoint}: lower>exact {trip}")
                    if p.gap_exact < -1e-9:
                        ok = False
                        msgs.append(f"{algo} t={rep.checkpoint}: exact negative")
                if p.gap_upper < -1e-9 or p.gap_reported < -1e-9:
                    ok = False
                    msgs.append(f"{algo} t={rep.checkpoint}: upper/reported negative")
                if not -1e-9 <= p.value_certified <= H + 1e-9:
                    ok = False
                    msgs.append(f"{algo} t={rep.checkpoint}: value {p.value_certified} outside [0,H]")
    detail = "; ".join(msgs[:4]) if msgs else (
        "lower <= exact <= upper (+1e-9), gaps >= -1e-9, values in [0,H] at every checkpoint"
    )
    return ok, detail


def check_determinism(ctx: AcceptanceContext):
    for algo in _ALGOS:
        outputs = []
        for _ in range(2):
            game = toy_game()
            _, _, lines = cli.execute_run(
                game, "toy", algo, 64, "constant", MAIN_ETA, 1.0, None, True
            )
            outputs.append("\n".join(lines))
        if outputs[0] != outputs[1]:
            return False, f"{algo}: two identical configs produced different CSV bytes"
        if outputs[0].encode() != outputs[1].encode():
            return False, f"{algo}: CSV byte encodings differ"
    return True, "byte-identical CSV across repeated runs for all three algorithms (T=64)"


def check_ce_rate_envelope(ctx: AcceptanceContext):
    result, reports = ctx.theory_ce_run()
    game = result.game
    N, H, A = game.num_players, game.horizon, max(game.action_counts)
    worst_ratio = 0.0
    for rep in reports:
        if rep.checkpoint < 2:
            continue
        bound = 6144.0 * N * H**3.5 * A**2.5 * np.log(rep.checkpoint) / rep.checkpoint
        for p in rep.players:
            gap = p.gap_exact if p.gap_exact is not None else p.gap_upper
            worst_ratio = max(worst_ratio, gap / bound)
            if gap > bound:
                return False, (
                    f"t={rep.checkpoint}: exact gap {gap:.3e} exceeds the envelope {bound:.3e}"
                )
    return True, (
        f"exact gap / envelope <= {worst_ratio:.3e} at every checkpoint >= 2 "
        f"(eta = {result.eta!r})"
    )


def check_cce_rate_envelope(ctx: AcceptanceContext):
    result, reports = ctx.theory_stage_run()
    game = result.game
    N, H, A = game.num_players, game.horizon, max(game.action_counts)
    c_fit = 0.0
    for rep in reports:
        if rep.checkpoint < 2**6:
            continue
        denom = N * H**3 * np.log(A) * np.log(rep.checkpoint) ** 5 / rep.checkpoint
        for p in rep.players:
            c_fit = max(c_fit, p.gap_upper / denom)
    return c_fit <= 1e6, (
        f"fitted constant C' = {c_fit:.6g} (<= 1e6) over checkpoints >= 64 with theory eta"
    )


def check_monotone_convergence(ctx: AcceptanceContext):
    msgs = []
    ok = True
    for algo in _ALGOS:
        _, reports = ctx.main_run(algo)
        by_t = {rep.checkpoint: rep.max_gap_reported() for rep in reports}
        early, late = by_t[2**8], by_t[2**14]
        if late > early / 4.0:
            ok = False
        msgs.append(f"{algo}: gap(2^14)={late:.3e} vs gap(2^8)/4={early / 4.0:.3e}")
    return ok, "; ".join(msgs)


def check_rate_plateau(ctx: AcceptanceContext):
    msgs = []
    ok = True
    grid = [2**k for k in range(10, 15)]
    for algo in _ALGOS:
        _, reports = ctx.main_run(algo)
        by_t = {rep.checkpoint: rep.max_gap_reported() for rep in reports}
        series = [by_t[t] * t for t in grid]
        neighbor = max(
            max(a, b) / min(a, b) for a, b in zip(series, series[1:])
        )
        spread = max(series) / min(series)
        if neighbor > 2.0 or spread > 3.0:
            ok = False
        msgs.append(f"{algo}: neighbor ratio {neighbor:.3f} (<=2), range ratio {spread:.3f} (<=3)")
    return ok, "; ".join(msgs)


# ---------------------------------------------------------------------------
# registry and runner
# ---------------------------------------------------------------------------

CRITERIA = (
    ("toy_game_fixtures", check_toy_game_fixtures),
    ("kernels_logbarrier", check_kernels_logbarrier),
    ("kernels_stationary", check_kernels_stationary),
    ("kernels_schedules", check_kernels_schedules),
    ("oracle_equivalence", check_oracle_equivalence),
    ("swap_regret_nonneg", check_swap_regret_nonneg),
    ("value_identity", check_value_identity),
    ("bound_ordering", check_bound_ordering),
    ("determinism", check_determinism),
    ("ce_rate_envelope", check_ce_rate_envelope),
    ("cce_rate_envelope", check_cce_rate_envelope),
    ("monotone_convergence", check_monotone_convergence),
    ("rate_plateau", check_rate_plateau),
)

CRITERION_NAMES = tuple(name for name, _ in CRITERIA)


def run_criterion(name: str, ctx: AcceptanceContext):
    for cname, func in CRITERIA:
        if cname == name:
            return func(ctx)
    raise KeyError(f"unknown criterion {name!r}")


def run_acceptance(only: str | None = None, stream=None, ctx: AcceptanceContext | None = None):
    """Run (a filtered subset of) the suite; prints one line per criterion and
    a final tally; returns True iff every executed criterion passed."""
    stream = stream if stream is not None else sys.stdout
    ctx = ctx or AcceptanceContext()
    selected = [(n, f) for n, f in CRITERIA if only is None or only in n]
    if not selected:
        print(f"no criteria match {only!r}", file=stream)
        return False
    passed = 0
    for name, func in selected:
        ok, detail = func(ctx)
        passed += ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=stream)
    print(f"overall: {passed}/{len(selected)} criteria passed", file=stream)
    return passed == len(selected)
