"""Finite-horizon general-sum Markov games: model, validation, JSON file format.

A game has N players, horizon H, states S, per-player action sets A_i, rewards
r_{h,i}(s, a) in [0, 1] and transition kernels P_h(s' | s, a), where a is a
joint action. Joint actions are stored flat in row-major order over
(a_1, ..., a_N): player 1 varies slowest, player N fastest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class GameFormatError(ValueError):
    """Malformed game document; the message names the offending field."""


class GameValidationError(ValueError):
    """Well-formed document whose numbers violate the model constraints."""


def joint_strides(action_counts: Sequence[int]) -> tuple[int, ...]:
    """Row-major strides: stride_i = prod of action counts of players after i."""
    strides = [1] * len(action_counts)
    for i in range(len(action_counts) - 2, -1, -1):
        strides[i] = strides[i + 1] * action_counts[i + 1]
    return tuple(strides)


def encode_joint(actions: Sequence[int], action_counts: Sequence[int]) -> int:
    """Flat row-major index of a joint action tuple."""
    if len(actions) != len(action_counts):
        raise ValueError("joint action arity does not match player count")
    index = 0
    for a, count, stride in zip(actions, action_counts, joint_strides(action_counts)):
        if not 0 <= a < count:
            raise ValueError(f"action {a} out of range [0, {count})")
        index += a * stride
    return index


def decode_joint(index: int, action_counts: Sequence[int]) -> tuple[int, ...]:
    """Inverse of encode_joint."""
    size = int(np.prod(action_counts))
    if not 0 <= index < size:
        raise ValueError(f"joint index {index} out of range [0, {size})")
    out = []
    for stride in joint_strides(action_counts):
        out.append(index // stride)
        index %= stride
    return tuple(out)


@dataclass(frozen=True)
class MarkovGame:
    """Immutable game data. Arrays are frozen (non-writeable) at construction.

    rewards     : (H, N, S, A_joint) float64 array
    transitions : (H, S, A_joint, S) float64 array
    """

    horizon: int
    states: tuple[str, ...]
    action_names: tuple[tuple[str, ...], ...]
    initial_state: str
    rewards: np.ndarray
    transitions: np.ndarray

    def __post_init__(self):
        rewards = np.ascontiguousarray(self.rewards, dtype=np.float64)
        transitions = np.ascontiguousarray(self.transitions, dtype=np.float64)
        object.__setattr__(self, "rewards", rewards)
        object.__setattr__(self, "transitions", transitions)
        H, N, S = self.horizon, len(self.action_names), len(self.states)
        A = self.joint_size
        if rewards.shape != (H, N, S, A):
            raise ValueError(f"rewards shape {rewards.shape} != {(H, N, S, A)}")
        if transitions.shape != (H, S, A, S):
            raise ValueError(f"transitions shape {transitions.shape} != {(H, S, A, S)}")
        if self.initial_state not in self.states:
            raise ValueError(f"initial state {self.initial_state!r} not in states")
        rewards.flags.writeable = False
        transitions.flags.writeable = False

    @property
    def num_players(self) -> int:
        return len(self.action_names)

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(len(names) for names in self.action_names)

    @property
    def joint_size(self) -> int:
        return int(np.prod(self.action_counts))

    @property
    def initial_index(self) -> int:
        return self.states.index(self.initial_state)

    def equals(self, other: "MarkovGame") -> bool:
        return (
            self.horizon == other.horizon
            and self.states == other.states
            and self.action_names == other.action_names
            and self.initial_state == other.initial_state
            and np.array_equal(self.rewards, other.rewards)
            and np.array_equal(self.transitions, other.transitions)
        )


@dataclass(frozen=True)
class Violation:
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[Violation, ...]


_ROW_SUM_TOL = 1e-12


def validate(game: MarkovGame) -> ValidationResult:
    """Check reward ranges and transition-row stochasticity; list every violation."""
    bad: list[Violation] = []
    H, N, S = game.horizon, game.num_players, game.num_states
    counts = game.action_counts
    for h in range(H):
        for i in range(N):
            for s in range(S):
                row = game.rewards[h, i, s]
                for a in range(game.joint_size):
                    r = row[a]
                    if not np.isfinite(r) or r < 0.0 or r > 1.0:
                        where = f"h={h + 1} player={i + 1} s={game.states[s]} a={decode_joint(a, counts)}"
                        bad.append(Violation(where, f"reward {r!r} outside [0, 1]"))
        for s in range(S):
            for a in range(game.joint_size):
                row = game.transitions[h, s, a]
                where = f"h={h + 1} s={game.states[s]} a={decode_joint(a, counts)}"
                if np.any(row < 0.0) or not np.all(np.isfinite(row)):
                    bad.append(Violation(where, "negative or non-finite transition probability"))
                elif abs(row.sum() - 1.0) > _ROW_SUM_TOL:
                    bad.append(Violation(where, f"transition row sums to {row.sum()!r}, not 1"))
    return ValidationResult(not bad, tuple(bad))


def toy_game() -> MarkovGame:
    """Built-in 2-player, 2-state, 2-action, horizon-2 game used throughout.

    Matching joint actions (a0,b0) / (a1,b1) keep the current state with
    probability 0.8; opposite actions keep it with probability 0.2. The same
    reward/transition tables are used at both steps.
    """
    r1 = {  # player 1, rows = own action, cols = opponent action
        "s0": [[0.8, 0.2], [0.0, 1.0]],
        "s1": [[1.0, 0.2], [0.5, 0.8]],
    }
    r2 = {
        "s0": [[0.2, 1.0], [0.5, 0.0]],
        "s1": [[0.5, 1.0], [1.0, 0.2]],
    }
    states = ("s0", "s1")
    rewards = np.zeros((2, 2, 2, 4))
    transitions = np.zeros((2, 2, 4, 2))
    for s, name in enumerate(states):
        rewards[:, 0, s] = np.asarray(r1[name]).ravel()
        rewards[:, 1, s] = np.asarray(r2[name]).ravel()
        for a in range(4):
            a1, a2 = decode_joint(a, (2, 2))
            stay = 0.8 if a1 == a2 else 0.2
            transitions[:, s, a, s] = stay
            transitions[:, s, a, 1 - s] = 1.0 - stay
    return MarkovGame(
        horizon=2,
        states=states,
        action_names=(("a0", "a1"), ("b0", "b1")),
        initial_state="s0",
        rewards=rewards,
        transitions=transitions,
    )


def _need(obj, key, path, kind):
    if not isinstance(obj, dict):
        raise GameFormatError(f"{path}: expected an object")
    if key not in obj:
        raise GameFormatError(f"{path}: missing required field {key!r}")
    value = obj[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise GameFormatError(f"{path}.{key}: expected a number")
        return float(value)
    if not isinstance(value, kind):
        raise GameFormatError(f"{path}.{key}: expected {kind.__name__}")
    return value


def load_game(text: str) -> MarkovGame:
    """Parse and validate a UTF-8 JSON game document.

    Raises GameFormatError on schema problems (with the JSON path) and
    GameValidationError when the document is well-formed but the numbers
    violate the model constraints.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"invalid JSON: {exc}") from exc

    n_players = _need(doc, "players", "$", int)
    horizon = _need(doc, "horizon", "$", int)
    states = _need(doc, "states", "$", list)
    actions = _need(doc, "actions", "$", list)
    initial = _need(doc, "initial_state", "$", str)
    rewards_doc = _need(doc, "rewards", "$", dict)
    transitions_doc = _need(doc, "transitions", "$", dict)

    if n_players < 1:
        raise GameFormatError("$.players: must be >= 1")
    if horizon < 1:
        raise GameFormatError("$.horizon: must be >= 1")
    if not states or not all(isinstance(s, str) for s in states):
        raise GameFormatError("$.states: expected a non-empty list of strings")
    if len(set(states)) != len(states):
        raise GameFormatError("$.states: duplicate state names")
    if len(actions) != n_players:
        raise GameFormatError(f"$.actions: expected {n_players} per-player lists")
    for i, names in enumerate(actions):
        if not isinstance(names, list) or not names or not all(isinstance(a, str) for a in names):
            raise GameFormatError(f"$.actions[{i}]: expected a non-empty list of strings")
    if initial not in states:
        raise GameFormatError(f"$.initial_state: unknown state {initial!r}")

    counts = tuple(len(names) for names in actions)
    joint = int(np.prod(counts))
    S = len(states)
    rewards = np.zeros((horizon, n_players, S, joint))
    transitions = np.zeros((horizon, S, joint, S))
    state_index = {name: k for k, name in enumerate(states)}

    for h in range(1, horizon + 1):
        hk = str(h)
        r_h = _need(rewards_doc, hk, "$.rewards", dict)
        for i in range(1, n_players + 1):
            r_hi = _need(r_h, str(i), f"$.rewards.{hk}", dict)
            for name in states:
                row = _need(r_hi, name, f"$.rewards.{hk}.{i}", list)
                path = f"$.rewards.{hk}.{i}.{name}"
                if len(row) != joint:
                    raise GameFormatError(f"{path}: expected {joint} entries, got {len(row)}")
                for a, value in enumerate(row):
                    if not isinstance(value, (int, float)) or isinstance(value, bool):
                        raise GameFormatError(f"{path}[{a}]: expected a number")
                rewards[h - 1, i - 1, state_index[name]] = row

        t_h = _need(transitions_doc, hk, "$.transitions", dict)
        for name in states:
            t_hs = _need(t_h, name, f"$.transitions.{hk}", dict)
            for a in range(joint):
                row = _need(t_hs, str(a), f"$.transitions.{hk}.{name}", dict)
                path = f"$.transitions.{hk}.{name}.{a}"
                for target, prob in row.items():
                    if target not in state_index:
                        raise GameFormatError(f"{path}: unknown state {target!r}")
                    if not isinstance(prob, (int, float)) or isinstance(prob, bool):
                        raise GameFormatError(f"{path}.{target}: expected a number")
                    transitions[h - 1, state_index[name], a, state_index[target]] = prob

    game = MarkovGame(
        horizon=horizon,
        states=tuple(states),
        action_names=tuple(tuple(names) for names in actions),
        initial_state=initial,
        rewards=rewards,
        transitions=transitions,
    )
    result = validate(game)
    if not result.ok:
        listed = "; ".join(str(v) for v in result.violations[:10])
        more = "" if len(result.violations) <= 10 else f" (+{len(result.violations) - 10} more)"
        raise GameValidationError(f"{len(result.violations)} violation(s): {listed}{more}")
    return game


def save_game(game: MarkovGame) -> str:
    """Serialize a game to the JSON document format (load_game round-trips it)."""
    rewards: dict = {}
    transitions: dict = {}
    for h in range(game.horizon):
        hk = str(h + 1)
        rewards[hk] = {
            str(i + 1): {
                name: [float(x) for x in game.rewards[h, i, s]]
                for s, name in enumerate(game.states)
            }
            for i in range(game.num_players)
        }
        transitions[hk] = {}
        for s, name in enumerate(game.states):
            transitions[hk][name] = {
                str(a): {
                    target: float(game.transitions[h, s, a, k])
                    for k, target in enumerate(game.states)
                    if game.transitions[h, s, a, k] != 0.0
                }
                for a in range(game.joint_size)
            }
    doc = {
        "players": game.num_players,
        "horizon": game.horizon,
        "states": list(game.states),
        "actions": [list(names) for names in game.action_names],
        "initial_state": game.initial_state,
        "rewards": rewards,
        "transitions": transitions,
    }
    return json.dumps(doc, indent=2)
