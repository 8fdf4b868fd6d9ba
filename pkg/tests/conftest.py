import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from scaled_euler import RiemannData, brio  # noqa: E402


@pytest.fixture
def symmetric():
    return RiemannData.from_values(1.0, 1.0, -1.0, 1.0)


@pytest.fixture
def skewed():
    return RiemannData.from_values(2.0, 1.0, 0.0, 3.0)


@pytest.fixture
def brio_small():
    return brio(1e-4)
