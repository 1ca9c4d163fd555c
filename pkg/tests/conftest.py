import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_phi(rng, N):
    from flattorus import SNVector

    return SNVector(rng.normal(size=N) + 1j * rng.normal(size=N))
