"""Step-size and weighting schedules shared by the learning dynamics.

alpha_t = (H+1)/(H+t) is the incremental value-update step size. The induced
mixture profile alpha_t^j = alpha_j * prod_{j'=j+1..t} (1 - alpha_{j'}) sums to
one over j <= t and defines both the certified output policy and all prefix
mixtures in the evaluator. The OFTRL weights w_j = alpha_t^j / alpha_t^1 are
t-independent and satisfy w_1 = 1, w_j = w_{j-1} * (H+j-1)/(j-1); they grow
like j^H, so running code keeps accumulators normalized by the current w_t and
only ever uses the ratio w_t / w_{t+1} = t / (H+t).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np


def step_size(t: int, horizon: int) -> float:
    """alpha_t = (H+1)/(H+t); alpha_1 = 1."""
    if t < 1 or horizon < 1:
        raise ValueError("t and horizon must be >= 1")
    return (horizon + 1) / (horizon + t)


def mixture_weights(t: int, horizon: int) -> np.ndarray:
    """[alpha_t^1, ..., alpha_t^t] via the literal recurrence (O(t^2) total).

    alpha_t^j = alpha_{t-1}^j * (1 - alpha_t) for j < t, alpha_t^t = alpha_t.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    out = np.zeros(t)
    out[0] = 1.0
    for k in range(2, t + 1):
        a = step_size(k, horizon)
        out[: k - 1] *= 1.0 - a
        out[k - 1] = a
    return out


def mixture_scan(t_max: int, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form mixture factors for vectorized prefix mixing.

    Returns (C, D) of length t_max+1 with C[t] = prod_{j=2..t}(1 - alpha_j) and
    D[j] = alpha_j / C[j], so that for any per-iteration sequence y_j,
    sum_{j<=t} alpha_t^j y_j = C[t] * cumsum(D * y)[t]. Index 0 is unused.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    js = np.arange(t_max + 1, dtype=np.float64)
    alpha = np.ones(t_max + 1)
    alpha[1:] = (horizon + 1) / (horizon + js[1:])
    C = np.ones(t_max + 1)
    if t_max >= 2:
        C[2:] = np.cumprod((js[2:] - 1.0) / (horizon + js[2:]))
    D = np.zeros(t_max + 1)
    D[1:] = alpha[1:] / C[1:]
    return C, D


def mixture_weight_sums(t_max: int, horizon: int) -> np.ndarray:
    """sums[t] = sum_j alpha_t^j for t = 1..t_max, in extended precision.

    Uses the closed form alpha_t^j = alpha_j * C_t / C_j with longdouble
    cumprod/cumsum so the whole grid costs O(t_max). Index 0 is unused (1.0).
    """
    js = np.arange(t_max + 1, dtype=np.longdouble)
    alpha = np.ones(t_max + 1, dtype=np.longdouble)
    alpha[1:] = (horizon + 1) / (horizon + js[1:])
    C = np.ones(t_max + 1, dtype=np.longdouble)
    if t_max >= 2:
        C[2:] = np.cumprod((js[2:] - 1.0) / (horizon + js[2:]))
    D = np.zeros(t_max + 1, dtype=np.longdouble)
    D[1:] = alpha[1:] / C[1:]
    sums = C * np.cumsum(D)
    sums[0] = 1.0
    return sums


def oftrl_weight(j: int, horizon: int) -> float:
    """w_j with w_1 = 1 and w_j = w_{j-1} * (H+j-1)/(j-1). Grows like j^H."""
    if j < 1:
        raise ValueError("j must be >= 1")
    w = 1.0
    for k in range(2, j + 1):
        w *= (horizon + k - 1) / (k - 1)
    return w


def weight_ratio(t: int, horizon: int) -> float:
    """w_t / w_{t+1} = t / (H + t), the only form running code needs."""
    return t / (horizon + t)


@dataclass(frozen=True)
class StageSchedule:
    """Epoch layout for the stage-based dynamics.

    L_1 = H, L_{tau+1} = floor((1 + 1/H) L_tau); stage tau covers iterations
    [starts[tau-1], ends[tau-1]] (1-based, inclusive); the last stage is
    truncated at T.
    """

    horizon: int
    total: int
    lengths: tuple[int, ...]
    starts: tuple[int, ...]
    ends: tuple[int, ...]

    @property
    def num_stages(self) -> int:
        return len(self.lengths)

    def stage_of(self, t: int) -> int:
        """1-based stage index of iteration t."""
        if not 1 <= t <= self.total:
            raise ValueError(f"t={t} outside [1, {self.total}]")
        return bisect_right(self.starts, t)

    def nominal_length(self, stage: int) -> int:
        """Untruncated L_tau (the divisor used by the stage value update)."""
        L = self.horizon
        for _ in range(stage - 1):
            L += L // self.horizon  # floor((1 + 1/H) L) in exact arithmetic
        return L


def stage_schedule(horizon: int, total: int) -> StageSchedule:
    if horizon < 1 or total < 1:
        raise ValueError("horizon and total must be >= 1")
    lengths: list[int] = []
    starts: list[int] = []
    ends: list[int] = []
    t, L = 1, horizon
    while t <= total:
        end = min(t + L - 1, total)
        starts.append(t)
        ends.append(end)
        lengths.append(end - t + 1)
        t = end + 1
        L += L // horizon  # floor((1 + 1/H) L) in exact arithmetic
    return StageSchedule(horizon, total, tuple(lengths), tuple(starts), tuple(ends))


def stage_count_bound(horizon: int, total: int) -> int:
    """Upper bound ceil(H ln T / ln(e/2)) + 1 on the number of stages."""
    if total <= 1:
        return 2
    return math.ceil(horizon * math.log(total) / math.log(math.e / 2)) + 1
