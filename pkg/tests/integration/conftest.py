"""Conftest for the acceptance suites: larger path counts and finer grids than the unit tests."""

from __future__ import annotations

import pytest

from src.sde.models import MonteCarloParams


@pytest.fixture
def large_mc() -> MonteCarloParams:
    return MonteCarloParams(n_paths=1_000_000, seed=20240611, steps_per_unit_time=2000, block_size=65536, workers=4)


@pytest.fixture
def medium_mc() -> MonteCarloParams:
    return MonteCarloParams(n_paths=100_000, seed=99, steps_per_unit_time=2000, block_size=16384, workers=4)
