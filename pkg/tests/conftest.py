import numpy as np
import pytest

from essprk.tableau import ButcherTableau


@pytest.fixture
def ssprk33():
    A = np.zeros((3, 3))
    A[1, 0] = 1.0
    A[2, 0] = 0.25
    A[2, 1] = 0.25
    return ButcherTableau(A=A, b=np.array([1 / 6, 1 / 6, 2 / 3]))


@pytest.fixture
def rk4():
    A = np.zeros((4, 4))
    A[1, 0] = 0.5
    A[2, 1] = 0.5
    A[3, 2] = 1.0
    return ButcherTableau(A=A, b=np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6]))


@pytest.fixture
def forward_euler():
    return ButcherTableau(A=np.zeros((1, 1)), b=np.ones(1))


def make_random_tableau(rng, s, nonnegative=True):
    """Random explicit tableau; nonnegative entries keep SSP radii positive."""
    A = np.tril(rng.uniform(0.0, 1.0 / s, (s, s)), -1)
    if not nonnegative:
        A = np.tril(rng.uniform(-1.0, 1.0, (s, s)), -1)
    b = rng.uniform(0.05, 1.0, s)
    b = b / b.sum()
    return ButcherTableau(A=A, b=b)
