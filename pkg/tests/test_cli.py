"""Command-line driver and its CSV contract: fixed header and row order,
repr-formatted floats, the "guarded" marker, byte-identical reruns, and
argument failures that exit with a usage error."""

import numpy as np
import pytest

from markov_oftrl.cli import CSV_HEADER, GUARD_MARKER, main
from markov_oftrl.games import MarkovGame, save_game


def _run_csv(tmp_path, args, name="out.csv"):
    out = tmp_path / name
    code = main(["run", "--out", str(out), *args])
    assert code == 0
    return out.read_text(encoding="utf-8")


def _rows(text):
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    return [line.split(",") for line in lines[1:]]


def test_csv_shape_and_header(tmp_path):
    text = _run_csv(tmp_path, ["--algo", "ce_smooth", "--T", "16", "--eta", "0.25"])
    rows = _rows(text)
    # 5 checkpoints x 2 players x 6 metrics
    assert len(rows) == 5 * 2 * 6
    for row in rows:
        assert len(row) == 8
        algo, game, eta_mode, eta, t, player, metric, value = row
        assert algo == "ce_smooth"
        assert game == "toy"
        assert eta_mode == "constant"
        assert eta == "0.25"
        assert int(t) in (1, 2, 4, 8, 16)
        assert player in ("1", "2")
        float(value)  # every toy-game metric is numeric
    metrics = {row[6] for row in rows}
    assert metrics == {
        "value_certified",
        "gap_exact",
        "gap_upper",
        "gap_lower",
        "gap_reported",
        "gap_times_T",
    }


def test_csv_is_byte_deterministic(tmp_path):
    args = ["--algo", "cce_stage", "--T", "24", "--eta", "0.5", "--diagnostics"]
    a = _run_csv(tmp_path, args, "a.csv")
    b = _run_csv(tmp_path, args, "b.csv")
    assert a.encode() == b.encode()


def test_gap_times_t_column(tmp_path):
    text = _run_csv(tmp_path, ["--algo", "cce_smooth", "--T", "8", "--eta", "0.4"])
    cells = {(r[4], r[5], r[6]): r[7] for r in _rows(text)}
    for (t, player, metric), value in cells.items():
        if metric != "gap_reported":
            continue
        product = cells[(t, player, "gap_times_T")]
        assert float(product) == float(value) * int(t)


def test_no_gap_exact_rows_outside_swap_algorithm(tmp_path):
    text = _run_csv(tmp_path, ["--algo", "cce_smooth", "--T", "4", "--eta", "0.4"])
    assert not [r for r in _rows(text) if r[6] == "gap_exact"]
    text = _run_csv(tmp_path, ["--algo", "cce_stage", "--T", "4", "--eta", "0.4"])
    assert not [r for r in _rows(text) if r[6] == "gap_exact"]


def test_diagnostics_rows(tmp_path):
    text = _run_csv(
        tmp_path, ["--algo", "ce_smooth", "--T", "8", "--eta", "0.3", "--diagnostics"]
    )
    swap_rows = [r for r in _rows(text) if r[6] == "swapreg_max"]
    assert swap_rows and all(float(r[7]) >= 0.0 for r in swap_rows)
    text = _run_csv(
        tmp_path, ["--algo", "cce_stage", "--T", "12", "--eta", "0.5", "--diagnostics"]
    )
    stage_rows = [r for r in _rows(text) if r[6] == "stagereg_max"]
    assert stage_rows and all(np.isfinite(float(r[7])) for r in stage_rows)


def test_theory_eta_in_csv(tmp_path):
    text = _run_csv(tmp_path, ["--algo", "ce_smooth", "--T", "4", "--eta", "theory"])
    for row in _rows(text):
        assert row[2] == "theory"
        assert row[3] == "0.00048828125"  # 1/2048 for the built-in game


def test_explicit_checkpoints(tmp_path):
    text = _run_csv(
        tmp_path, ["--algo", "cce_smooth", "--T", "10", "--eta", "0.4", "--checkpoints", "3,9"]
    )
    assert {r[4] for r in _rows(text)} == {"3", "9"}


def _wide_game_file(tmp_path, counts, n_states=2):
    rng = np.random.default_rng(20827)
    joint = int(np.prod(counts))
    rewards = rng.random((2, len(counts), n_states, joint))
    transitions = rng.random((2, n_states, joint, n_states)) + 0.1
    transitions /= transitions.sum(axis=-1, keepdims=True)
    game = MarkovGame(
        horizon=2,
        states=tuple(f"s{k}" for k in range(n_states)),
        action_names=tuple(tuple(f"p{i}a{a}" for a in range(c)) for i, c in enumerate(counts)),
        initial_state="s0",
        rewards=rewards,
        transitions=transitions,
    )
    path = tmp_path / "wide.json"
    path.write_text(save_game(game), encoding="utf-8")
    return path


def test_guard_marker_in_csv(tmp_path):
    # 4 actions each: swap enumeration 4^16 trips the guard, Markov 4^4 does not
    path = _wide_game_file(tmp_path, (4, 4))
    text = _run_csv(
        tmp_path, ["--game", str(path), "--algo", "ce_smooth", "--T", "4", "--eta", "0.3"]
    )
    rows = _rows(text)
    exact = [r for r in rows if r[6] == "gap_exact"]
    assert exact and all(r[7] == GUARD_MARKER for r in exact)
    lower = [r for r in rows if r[6] == "gap_lower"]
    assert lower and all(r[7] != GUARD_MARKER for r in lower)
    # reported falls back to the upper bound and stays numeric
    for r in rows:
        if r[6] in ("gap_reported", "gap_upper", "gap_times_T", "value_certified"):
            float(r[7])
    assert [r[1] for r in rows] == [str(path)] * len(rows)


def test_stdout_csv_and_stderr_summary(capsys):
    code = main(["run", "--algo", "cce_stage", "--T", "6", "--eta", "0.5"])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.startswith(CSV_HEADER)
    assert "run: algo=cce_stage T=6" in captured.err
    assert "stage boundaries (stage ends): 2, 5, 6" in captured.err
    assert "uniform-fallback iterations" in captured.err


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--T", "0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--eta", "fast"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--eta", "-0.5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--algo", "fictitious_play"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--T", "8", "--checkpoints", "2,99"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--checkpoints", "one,two"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_missing_game_file():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--game", "/no/such/game.json", "--T", "2"])
    assert "cannot read" in str(exc.value.code)


def test_accept_subcommand_filter(capsys):
    code = main(["accept", "--only", "toy_game_fixtures"])
    captured = capsys.readouterr()
    assert code == 0
    assert "[PASS] toy_game_fixtures" in captured.out
    assert "overall: 1/1 criteria passed" in captured.out
    code = main(["accept", "--only", "zzz_not_a_criterion"])
    captured = capsys.readouterr()
    assert code == 1
    assert "no criteria match" in captured.out
