import numpy as np
import pytest

from unsharp_bell.sampling import DEFAULT_SEED


@pytest.fixture
def rng():
    return np.random.default_rng(DEFAULT_SEED)
