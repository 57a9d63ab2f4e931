import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from core.field_model import ModelConfig  # noqa: E402


@pytest.fixture
def weak_1d():
    return ModelConfig.from_eps_b(1, 1.0, -10.0)


@pytest.fixture
def moderate_1d():
    return ModelConfig.from_eps_b(1, 1.0, -1.0)


@pytest.fixture
def strong_1d():
    return ModelConfig.from_eps_b(1, 1.0, -0.1)


@pytest.fixture
def zero_field_1d():
    return ModelConfig.from_coupling(0.0, 2.0)
