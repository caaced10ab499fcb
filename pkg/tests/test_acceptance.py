"""Release gate: every acceptance criterion must pass at its stated tolerance.

One test per criterion, sharing a single AcceptanceContext so the long
reproduction runs (T = 2^14 per algorithm, plus the guarantee-rate runs)
execute once for the whole session. Each test prints its criterion's
PASS/FAIL line with the measured evidence.
"""

import pytest

from markov_oftrl.acceptance import AcceptanceContext, CRITERION_NAMES, run_criterion


@pytest.fixture(scope="session")
def acceptance_ctx():
    return AcceptanceContext()


@pytest.mark.parametrize("name", CRITERION_NAMES)
def test_criterion(name, acceptance_ctx):
    ok, detail = run_criterion(name, acceptance_ctx)
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"
