import random

import pytest

from veribid import groupot, paillier


@pytest.fixture(scope="session")
def tiny_key():
    """p=5, q=7: n=35, the exhaustively checkable key."""
    return paillier.keygen(6, prime_source=paillier.fixed_primes(5, 7))


@pytest.fixture(scope="session")
def key64():
    return paillier.keygen(64, rng=random.Random(64001))


@pytest.fixture(scope="session")
def key128():
    return paillier.keygen(128, rng=random.Random(128001))


@pytest.fixture(scope="session")
def key256():
    return paillier.keygen(256, rng=random.Random(256001))


@pytest.fixture(scope="session")
def group24():
    return groupot.group_setup(24, seed=2401)


@pytest.fixture(scope="session")
def group512():
    return groupot.group_setup(512, seed=51201)
