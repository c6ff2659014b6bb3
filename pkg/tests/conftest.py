import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from voxplane import ExtractionConfig, gen_corner


@pytest.fixture(scope="session")
def corner_cloud():
    """The pinned corner scene used by quality and golden-file tests."""
    return gen_corner(seed=0)


@pytest.fixture(scope="session")
def default_config():
    return ExtractionConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
