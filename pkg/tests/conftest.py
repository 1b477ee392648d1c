import numpy as np
import pytest

from intlat import painleve as pv


@pytest.fixture(scope="session")
def traj():
    """Ising transcendent on the default window [0.5, 12]."""
    return pv.solve_eta()


@pytest.fixture(scope="session")
def traj_1_12():
    return pv.solve_eta(x_min=1.0, grid=pv.uniform_grid(1.0, 12.0, 0.05))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
