import numpy as np
import pytest

from macresolve import adder_mac, induced_joint, noisy_adder_mac


@pytest.fixture(scope="session")
def adder():
    return adder_mac()


@pytest.fixture(scope="session")
def noisy():
    return noisy_adder_mac()


@pytest.fixture(scope="session")
def adder_joint(adder):
    return induced_joint(adder)


@pytest.fixture(scope="session")
def noisy_joint(noisy):
    return induced_joint(noisy)


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.Philox(20240817))
