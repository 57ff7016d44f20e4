import math

import numpy as np
import pytest
from hypothesis import settings

from thermofid.model import make_mode

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def polar_mode(lam, theta):
    return make_mode(lam * math.cos(theta), lam * math.sin(theta))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
