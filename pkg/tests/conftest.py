import pytest

from partialnet.connectivity import DEFAULT_DEGREE_GRID, phase_sweep

#: Master seed for all Monte Carlo fixtures and acceptance runs.
MASTER_SEED = 20240817


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte Carlo checks")


@pytest.fixture(scope="session")
def default_sweep_m1000():
    """Full default degree grid at desk scale; shared across test modules."""
    return phase_sweep(n=100, r0=1.0, degree_grid=DEFAULT_DEGREE_GRID,
                       m=1000, seed=MASTER_SEED)
