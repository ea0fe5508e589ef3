import numpy as np
import pytest

from rarelimit.gas import GasModel, PrimitiveState
from rarelimit.waves import make_setup


@pytest.fixture
def setup_g2():
    """gamma=2 wave from the unit right state; u_minus = -2*sqrt(2)."""
    return make_setup(GasModel(gamma=2.0, alpha=1.0), PrimitiveState(1.0, 0.0, 1.0))


@pytest.fixture
def setup_g14():
    """gamma=1.4, alpha=0.5 wave from the unit right state."""
    return make_setup(GasModel(gamma=1.4, alpha=0.5), PrimitiveState(1.0, 0.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
