import numpy as np
import pytest

from wavebif import ModelParams, solve_point, trace_branch

BRANCH_RHOS = (1e-2, 10**-2.5, 1e-3)


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def point(params):
    """Converged point at p = 1, m = sqrt(2), rho = 1e-2 (default truncation)."""
    return solve_point(1e-2, params)


@pytest.fixture(scope="session")
def branch(params):
    return trace_branch(list(BRANCH_RHOS), params)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
