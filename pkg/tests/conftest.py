from __future__ import annotations

from typing import List

import numpy as np
import pytest

from backend.app.schemas import SweepRow
from backend.app.services.scheme_optimizer import sweep_alpha
from backend.quantum.bloch_core import make_rng


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20240601)


@pytest.fixture(scope="session")
def full_sweep() -> List[SweepRow]:
    return sweep_alpha(0.0, 1.0, 101)


@pytest.fixture(scope="session")
def fine_sweep() -> List[SweepRow]:
    return sweep_alpha(0.0, 1.0, 1001)

