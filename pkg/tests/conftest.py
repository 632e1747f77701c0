import numpy as np
import pytest

from commat import bloch_basis
from commat.sampling import random_mixed_state, random_povm


@pytest.fixture
def basis2():
    return bloch_basis(2)


@pytest.fixture
def basis3():
    return bloch_basis(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_random_setup(basis, rng, n_states, n_outcomes):
    states = tuple(random_mixed_state(basis, rng) for _ in range(n_states))
    povm = random_povm(basis, rng, n_outcomes)
    return states, povm
