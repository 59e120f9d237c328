import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from pkcpc.scheme import SystemParams, keygen  # noqa: E402


@pytest.fixture
def toy_key():
    """n = 4, k = 2, A(s) = {2, 3}, P the identity."""
    params = SystemParams(m=2, k=2)
    return keygen(params, info_set=[2, 3], tail_order=[0, 1])


@pytest.fixture(scope="session")
def key_256():
    return keygen(SystemParams(m=8, k=192, selection_policy="r0"), seed_rng(21))


def seed_rng(seed):
    import numpy as np

    return np.random.default_rng(seed)
