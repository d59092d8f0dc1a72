import numpy as np
import pytest

try:
    from hypothesis import settings

    settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
    settings.load_profile("ci")
except ImportError:
    pass


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
