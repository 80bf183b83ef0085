import numpy as np
import pytest

from cptlottery import CptParams, Prospect, decision_weights
from cptlottery.presets import PRESETS

CRITERION_LINES = []


def record_criterion(num: int, name: str, checks):
    """Collect one pass/fail line per acceptance criterion and assert it.

    ``checks`` is a list of (label, ok, detail) tuples; the criterion passes
    only if every check does.
    """
    ok = all(c[1] for c in checks)
    line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {name}"
    CRITERION_LINES.append(line)
    print(line, flush=True)
    failed = [f"  {label}: {detail}" for label, good, detail in checks if not good]
    assert ok, f"{name} failed:\n" + "\n".join(failed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def canada():
    return PRESETS["canada"].params


@pytest.fixture
def usa():
    return PRESETS["usa"].params


@pytest.fixture
def greece():
    return PRESETS["greece"].params


def split_weights(params: CptParams, n: int, n_minus: int):
    """Decision weights of the uniform lottery prospect with the given split."""
    outcomes = np.concatenate((np.full(n_minus, -1.0), np.full(n - n_minus, 1.0)))
    prospect = Prospect(outcomes, np.full(n, 1.0 / n), n_minus)
    return decision_weights(params, prospect)


def random_params(rng, alpha_lt_beta=None):
    """Random behavioral constants; optionally force the exponent order."""
    while True:
        a = float(rng.uniform(0.2, 0.9))
        b = float(rng.uniform(0.2, 0.9))
        if alpha_lt_beta is True and not a < b - 0.05:
            continue
        if alpha_lt_beta is False and not a >= b:
            continue
        return CptParams(
            alpha=a,
            beta=b,
            lam=float(rng.uniform(0.5, 3.0)),
            gamma_plus=float(rng.uniform(0.3, 1.0)),
            gamma_minus=float(rng.uniform(0.3, 1.0)),
        )
