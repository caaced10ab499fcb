"""No-regret learning dynamics and equilibrium-gap certification for
finite-horizon general-sum Markov games."""

from markov_oftrl._kernels import BACKEND, available_backends
from markov_oftrl.cce_dynamics import (
    StageRunResult,
    run_cce_smooth,
    run_cce_stage,
    stage_eta_theory,
)
from markov_oftrl.ce_dynamics import (
    SmoothRunResult,
    default_checkpoints,
    run_ce,
    theory_eta_smooth,
)
from markov_oftrl.games import (
    GameFormatError,
    GameValidationError,
    MarkovGame,
    decode_joint,
    encode_joint,
    load_game,
    save_game,
    toy_game,
    validate,
)
from markov_oftrl.gap_eval import (
    ENUMERATION_GUARD,
    EnumerationGuardError,
    GapReport,
    PlayerGapReport,
    cce_markov_lower_bound,
    ce_gap_exact,
    certified_value_ce,
    evaluate_run,
    informed_deviation_gap,
    stage_avg_regret,
    swap_regret_table,
)
from markov_oftrl.schedules import StageSchedule, stage_count_bound, stage_schedule

__all__ = [
    "BACKEND",
    "ENUMERATION_GUARD",
    "EnumerationGuardError",
    "GameFormatError",
    "GameValidationError",
    "GapReport",
    "MarkovGame",
    "PlayerGapReport",
    "SmoothRunResult",
    "StageRunResult",
    "StageSchedule",
    "available_backends",
    "cce_markov_lower_bound",
    "ce_gap_exact",
    "certified_value_ce",
    "decode_joint",
    "default_checkpoints",
    "encode_joint",
    "evaluate_run",
    "informed_deviation_gap",
    "load_game",
    "run_cce_smooth",
    "run_cce_stage",
    "run_ce",
    "save_game",
    "stage_avg_regret",
    "stage_count_bound",
    "stage_eta_theory",
    "stage_schedule",
    "swap_regret_table",
    "theory_eta_smooth",
    "toy_game",
    "validate",
]

__version__ = "0.1.0"
