import numpy as np
import pytest

from tunnelsplit.model import ELECTRON_MASS, HBAR
from tunnelsplit.potentials import Delta, PiecewiseConstant, Rectangular

MASS = 0.067 * ELECTRON_MASS
E_AVG = 0.25
K0 = float(np.sqrt(2.0 * MASS * E_AVG) / HBAR)
L0 = 7.5

BARRIER = Rectangular(0.3, 500.0, 505.0)
WELL = Rectangular(-0.3, 500.0, 505.0)
POINT = Delta(0.05, 500.0)
STACK = PiecewiseConstant(500.0, ((0.2, 2.0), (0.35, 3.0), (0.2, 2.0)))


@pytest.fixture(scope="session")
def mass():
    return MASS


@pytest.fixture(scope="session")
def k0():
    return K0


@pytest.fixture(scope="session")
def profile():
    from tunnelsplit.packets import gaussian_profile
    return gaussian_profile(K0, L0)


@pytest.fixture(scope="session")
def barrier_tables(profile):
    from tunnelsplit.packets import k_tables
    return k_tables(BARRIER, profile.grid, MASS)


@pytest.fixture(scope="session")
def well_tables(profile):
    from tunnelsplit.packets import k_tables
    return k_tables(WELL, profile.grid, MASS)
