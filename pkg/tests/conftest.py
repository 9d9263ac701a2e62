import random

import pytest

from glptopo import formula as fm
from glptopo import kripke as kr
from glptopo import sampling
from glptopo.space import FiniteSpace, enumerate_topologies

CORPUS_SEED = 20240811


@pytest.fixture(scope="session")
def small_topologies():
    """All topologies on 1..4 points (one per preorder)."""
    spaces = []
    for n in (1, 2, 3, 4):
        spaces.extend(enumerate_topologies(n))
    return spaces


@pytest.fixture(scope="session")
def random_corpus():
    """500 seeded random spaces on 5-7 points."""
    rng = random.Random(CORPUS_SEED)
    spaces = []
    for i in range(500):
        spaces.append(sampling.random_space(rng, 5 + i % 3))
    return spaces


@pytest.fixture(scope="session")
def corpus(small_topologies, random_corpus):
    return small_topologies + random_corpus


@pytest.fixture(scope="session")
def trees_up_to_6():
    return kr.enumerate_trees(6)


# Frequently used spaces

@pytest.fixture
def sierpinski():
    return FiniteSpace.from_subbase(2, [[0]])


@pytest.fixture
def fork2_space():
    return kr.fork(2).to_space()


@pytest.fixture
def chain3_space():
    """Upset space of the chain 0 < 1 < 2 (node 0 is the root)."""
    return FiniteSpace.from_order([(0, 1), (0, 2), (1, 2)], mode="upset")
