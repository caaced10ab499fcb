"""Shared fixtures: the built-in game and short reusable runs of each dynamic.

The runs are deliberately small (T <= 48) so every module can inspect them
without re-running the dynamics; anything that needs a fresh trajectory builds
its own.
"""

import pytest

from markov_oftrl.cce_dynamics import run_cce_smooth, run_cce_stage
from markov_oftrl.ce_dynamics import run_ce
from markov_oftrl.games import toy_game


@pytest.fixture(scope="session")
def game():
    return toy_game()


@pytest.fixture(scope="session")
def ce_run(game):
    return run_ce(game, 48, 0.3, record_internals=True)


@pytest.fixture(scope="session")
def stage_run(game):
    # H=2, T=40: stages (1-2)(3-5)(6-9)(10-15)(16-24)(25-37)(38-40); the last
    # one is truncated, so both complete and incomplete stages are covered.
    return run_cce_stage(game, 40, eta=0.5)


@pytest.fixture(scope="session")
def smooth_run(game):
    return run_cce_smooth(game, 48, 0.4)
