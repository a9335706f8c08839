import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jumpcredit import JumpParams, MarketScenario  # noqa: E402


@pytest.fixture
def base():
    """The figure-caption base point: V=100, D=110, tau=2, sigma=0.2, r=0.05."""
    return MarketScenario(V=100.0, D=110.0, tau=2.0, sigma=0.2, r=0.05)


@pytest.fixture
def base_jumps():
    return JumpParams(lam=0.1, mu=-0.2, delta=0.6)


@pytest.fixture
def fig7():
    return MarketScenario(V=12.0, D=10.0, tau=2.0, sigma=0.2, r=0.05), JumpParams(lam=0.1, mu=0.8, delta=3.0)
