import numpy as np
import pytest

SEED = 20240517


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)
