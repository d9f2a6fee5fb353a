import math
from types import SimpleNamespace

import numpy as np
import pytest

from hermite_rolle import fitting, rolle
from hermite_rolle.target_function import builtin_exp_sin

X1 = 3 * math.pi / 2
XZ = 1e-5

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def exp_sin():
    return builtin_exp_sin()


@pytest.fixture(scope="session")
def prob(exp_sin):
    return rolle.RolleProblem.build(exp_sin, [0.0, X1])


@pytest.fixture(scope="session")
def worked(prob, exp_sin):
    """The full worked example on the default 100000-sample grid."""
    roots = rolle.bootstrap_xi(prob, XZ)
    traj = rolle.select_branch(prob, XZ, roots)
    g = fitting.rolle_samples(traj, prob)
    return SimpleNamespace(f=exp_sin, prob=prob, roots=roots, traj=traj, g=g,
                           exact=(1 - math.exp(X1)) / 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
