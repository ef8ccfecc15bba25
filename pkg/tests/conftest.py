import numpy as np
import pytest

from combspec import NotchResonator
from combspec import presets

REFERENCE_ROWS = presets.ROWS
REF_TARGETS = presets.TARGETS
REF_PUMPS = presets.PUMPS
REF_ASSIGNMENTS = presets.ASSIGNMENTS
table_rows = presets.rows


@pytest.fixture
def resonator_a():
    return NotchResonator(4.4696e9, 126e3, 98e3, 0.28)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
