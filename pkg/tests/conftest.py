import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def pytest_configure(config):
    # keep hypothesis deterministic across CI runs
    from hypothesis import settings
    settings.register_profile("suite", deadline=None, derandomize=True)
    settings.load_profile("suite")
