import math

import numpy as np
import pytest

from thermoflux.oracle import corpus
from thermoflux.statekit import State, System

# acceptance lines collected by test_acceptance and echoed in the summary
ACCEPTANCE_LINES = []

LN2 = math.log(2)


@pytest.fixture(scope="session")
def to_corpus():
    return corpus(500)


@pytest.fixture(scope="session")
def no_corpus():
    return corpus(200, mode="NO")


@pytest.fixture
def two_level():
    """Energies (0, ln 2) at beta = 1: Gibbs state (2/3, 1/3)."""
    return System([0.0, LN2], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_state(rng, n, zero_prob=0.0):
    p = rng.dirichlet(np.ones(n))
    if rng.random() < zero_prob:
        p[rng.integers(n)] = 0.0
        p /= p.sum()
    return State(p)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
