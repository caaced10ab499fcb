"""Command-line driver: run dynamics, evaluate gaps, emit CSV, run acceptance.

CSV schema (the external interface consumed by the plotting frontend): header
``algo,game,eta_mode,eta,T_checkpoint,player,metric,value`` with one row per
(checkpoint, player, metric). Metrics: value_certified, gap_exact (swap-regret
algorithm only), gap_upper, gap_lower, gap_reported, gap_times_T, plus
swapreg_max / stagereg_max under --diagnostics. Players are 1-based. Floats
are written with repr (shortest round-trip); a tripped enumeration guard
writes the marker string "guarded" instead of a number. Rows are emitted in a
fixed order (checkpoint, then player, then metric), so identical configs
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys

from markov_oftrl import gap_eval
from markov_oftrl.cce_dynamics import run_cce_smooth, run_cce_stage
from markov_oftrl.ce_dynamics import default_checkpoints, run_ce, theory_eta_smooth
from markov_oftrl.games import GameFormatError, GameValidationError, load_game, toy_game

CSV_HEADER = "algo,game,eta_mode,eta,T_checkpoint,player,metric,value"
GUARD_MARKER = "guarded"

_METRIC_ORDER = (
    "value_certified",
    "gap_exact",
    "gap_upper",
    "gap_lower",
    "gap_reported",
    "gap_times_T",
    "swapreg_max",
    "stagereg_max",
)


def _fmt(value) -> str:
    if value is None:
        return GUARD_MARKER
    return repr(float(value))


def run_to_rows(result, reports, game_name: str, eta_repr: str, diagnostics: bool) -> list[str]:
    """CSV body rows (no header) in deterministic order."""
    rows = []
    for rep in reports:
        for p in rep.players:
            cells = {
                "value_certified": _fmt(p.value_certified),
                "gap_upper": _fmt(p.gap_upper),
                "gap_lower": _fmt(p.gap_lower),
                "gap_reported": _fmt(p.gap_reported),
                "gap_times_T": _fmt(p.gap_reported * rep.checkpoint),
            }
            if result.algo == "ce_smooth":
                cells["gap_exact"] = _fmt(p.gap_exact)
            if diagnostics and p.swapreg_max is not None:
                cells["swapreg_max"] = _fmt(p.swapreg_max)
            if diagnostics and p.stagereg_max is not None:
                cells["stagereg_max"] = _fmt(p.stagereg_max)
            for metric in _METRIC_ORDER:
                if metric in cells:
                    rows.append(
                        f"{result.algo},{game_name},{result.eta_mode},{eta_repr},"
                        f"{rep.checkpoint},{p.player + 1},{metric},{cells[metric]}"
                    )
    return rows


def execute_run(game, game_name, algo, T, eta_mode, eta, theory_c, checkpoints, diagnostics):
    """Run one configuration end to end; returns (result, reports, csv_lines)."""
    if algo == "ce_smooth":
        value = theory_eta_smooth(game) if eta_mode == "theory" else eta
        result = run_ce(game, T, value, checkpoints=checkpoints, eta_mode=eta_mode)
        eta_repr = repr(float(value))
    elif algo == "cce_smooth":
        value = theory_eta_smooth(game) if eta_mode == "theory" else eta
        result = run_cce_smooth(game, T, value, checkpoints=checkpoints, eta_mode=eta_mode)
        eta_repr = repr(float(value))
    elif algo == "cce_stage":
        result = run_cce_stage(
            game, T, eta=eta, checkpoints=checkpoints, eta_mode=eta_mode, theory_c=theory_c
        )
        eta_repr = repr(float(theory_c if eta_mode == "theory" else eta))
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    reports = gap_eval.evaluate_run(result, diagnostics=diagnostics)
    lines = [CSV_HEADER] + run_to_rows(result, reports, game_name, eta_repr, diagnostics)
    return result, reports, lines


def _print_summary(result, reports, diagnostics: bool, out) -> None:
    print(
        f"run: algo={result.algo} T={result.T} eta_mode={result.eta_mode} "
        f"eta={result.eta} checkpoints={len(result.checkpoints)}",
        file=out,
    )
    if result.algo == "cce_stage":
        ends = ", ".join(str(e) for e in result.schedule.ends)
        print(f"stage boundaries (stage ends): {ends}", file=out)
        fallback = reports[-1].uniform_fallback_count
        print(f"uniform-fallback iterations (no prior completed stage): {fallback}", file=out)
    print(f"{'T_checkpoint':>12}  {'max_gap_reported':>18}  {'gap_reported*T':>16}", file=out)
    for rep in reports:
        g = rep.max_gap_reported()
        print(f"{rep.checkpoint:>12}  {g:>18.10f}  {g * rep.checkpoint:>16.6f}", file=out)
    if diagnostics:
        _print_diagnostic_fits(result, reports, out)


def _print_diagnostic_fits(result, reports, out) -> None:
    import numpy as np

    if result.algo == "ce_smooth":
        best = 0.0
        for rep in reports:
            if rep.checkpoint < 2:
                continue
            for p in rep.players:
                if p.swapreg_max is not None:
                    best = max(best, p.swapreg_max * rep.checkpoint / np.log(rep.checkpoint))
        print(f"fitted swap-regret envelope constant (SwapReg <= C log t / t): C = {best!r}", file=out)
    if result.algo == "cce_stage":
        game = result.game
        sched = result.schedule
        ln_a = max(np.log(max(game.action_counts)), np.log(2.0))
        best = 0.0
        for tau in range(1, sched.num_stages + 1):
            if sched.lengths[tau - 1] != sched.nominal_length(tau):
                continue
            L = sched.lengths[tau - 1]
            denom = game.num_players * game.horizon * ln_a * max(1.0, np.log(L) ** 4) / L
            for i in range(game.num_players):
                reg = gap_eval._stagereg_max(result, tau, i)
                best = max(best, reg / denom)
        print(
            "fitted stage-regret envelope constant "
            f"(Reg <= C N H log A log^4 L / L): C = {best!r}",
            file=out,
        )


def _parse_checkpoints(text: str, T: int) -> tuple[int, ...]:
    try:
        cps = tuple(sorted({int(tok) for tok in text.split(",") if tok.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}")
    if not cps:
        raise argparse.ArgumentTypeError("empty checkpoint list")
    if cps[0] < 1 or cps[-1] > T:
        raise argparse.ArgumentTypeError(f"checkpoints must lie in [1, {T}]")
    return cps


def _load_game_arg(spec: str):
    if spec == "toy":
        return toy_game(), "toy"
    try:
        with open(spec, encoding="utf-8") as fh:
            return load_game(fh.read()), spec
    except OSError as exc:
        raise SystemExit(f"cannot read game file {spec}: {exc}")
    except (GameFormatError, GameValidationError) as exc:
        raise SystemExit(f"bad game file {spec}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markov-oftrl",
        description="No-regret learning dynamics and equilibrium-gap evaluation "
        "on finite-horizon Markov games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one algorithm and emit gap metrics as CSV")
    run_p.add_argument("--game", default="toy", help='builtin "toy" or a JSON game file path')
    run_p.add_argument(
        "--algo",
        default="ce_smooth",
        choices=["ce_smooth", "cce_stage", "cce_smooth"],
        help="learning dynamics to run",
    )
    run_p.add_argument("--T", type=int, default=4096, help="number of iterations")
    run_p.add_argument(
        "--eta",
        default="0.2",
        help='learning rate: a number, or "theory" for the guarantee-backed schedule',
    )
    run_p.add_argument(
        "--theory-c",
        type=float,
        default=1.0,
        help="constant c in the stage learning rate c/(N max(1, ln^4 L)) (theory mode)",
    )
    run_p.add_argument("--checkpoints", default=None, help="comma-separated evaluation iterations")
    run_p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    run_p.add_argument(
        "--diagnostics",
        action="store_true",
        help="emit swap-regret / stage-regret diagnostic rows and envelope fits",
    )

    acc_p = sub.add_parser("accept", help="run the acceptance suite")
    acc_p.add_argument("--only", default=None, help="run only criteria whose name contains this")
    return parser


def cmd_run(args, parser) -> int:
    if args.T < 1:
        parser.error("--T must be >= 1")
    if args.eta == "theory":
        eta_mode, eta = "theory", None
    else:
        try:
            eta = float(args.eta)
        except ValueError:
            parser.error(f'--eta must be a number or "theory", got {args.eta!r}')
        if not eta > 0:
            parser.error("--eta must be positive")
        eta_mode = "constant"
    game, game_name = _load_game_arg(args.game)
    try:
        checkpoints = (
            _parse_checkpoints(args.checkpoints, args.T)
            if args.checkpoints is not None
            else default_checkpoints(args.T)
        )
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    result, reports, lines = execute_run(
        game,
        game_name,
        args.algo,
        args.T,
        eta_mode,
        eta,
        args.theory_c,
        checkpoints,
        args.diagnostics,
    )
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        _print_summary(result, reports, args.diagnostics, sys.stderr)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        _print_summary(result, reports, args.diagnostics, sys.stdout)
    return 0


def cmd_accept(args) -> int:
    from markov_oftrl.acceptance import run_acceptance

    ok = run_acceptance(only=args.only, stream=sys.stdout)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args, parser)
    if args.command == "accept":
        return cmd_accept(args)
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
