import numpy as np
import pytest

from vortexlab import Surface, solve
from vortexlab.kahler import FixedSection


@pytest.fixture(scope="session")
def surf64():
    return Surface.flat(nx=64, ny=64)


@pytest.fixture(scope="session")
def sol1(surf64):
    return solve(surf64, 1, [(2.0, 3.0)])


@pytest.fixture(scope="session")
def sol2(surf64):
    return solve(surf64, 2, [(1.5, 2.0), (4.0, 4.5)])


@pytest.fixture(scope="session")
def psi0s(sol2):
    s = sol2.surface
    return {
        "unit": FixedSection.unit(s, sol2.H),
        "solved": FixedSection.from_solution(sol2),
        "theta": FixedSection.theta(s, sol2.H, [(0.3, 5.0), (3.3, 1.2)]),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
