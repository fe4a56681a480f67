import random

import pytest

from lagsurf.lattice import RationalManifold


@pytest.fixture
def rng():
    return random.Random(20240607)


def cp2(k):
    return RationalManifold.cp2_blowup(k)
