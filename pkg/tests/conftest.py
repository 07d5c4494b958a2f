"""Shared test fixtures for the cauchylab test suite."""

from __future__ import annotations

import pytest

from src.models.payoff import PayoffSpec
from src.models.volatility import VolatilityModel
from src.pde.grid import build_grid
from src.pde.models import Grid, GridConfig
from src.sde.models import MonteCarloParams


@pytest.fixture
def gbm() -> VolatilityModel:
    """sigma(x) = x: geometric Brownian motion, a true martingale."""
    return VolatilityModel.cev(alpha=1.0, p=1.0)


@pytest.fixture
def cev2() -> VolatilityModel:
    """sigma(x) = x^2: the inverse Bessel process, a strict local martingale."""
    return VolatilityModel.cev(alpha=1.0, p=2.0)


@pytest.fixture
def identity() -> PayoffSpec:
    return PayoffSpec.identity()


@pytest.fixture
def call1() -> PayoffSpec:
    return PayoffSpec.call(1.0)


@pytest.fixture
def put1() -> PayoffSpec:
    return PayoffSpec.put(1.0)


@pytest.fixture
def small_mc() -> MonteCarloParams:
    """Enough paths for 3-sigma checks, few enough steps to stay fast."""
    return MonteCarloParams(n_paths=20_000, seed=7, steps_per_unit_time=200, block_size=4096)


@pytest.fixture
def coarse_grid() -> Grid:
    return build_grid(GridConfig(x_max=8.0, n_x=160, n_t=160))


@pytest.fixture
def bs_grid() -> Grid:
    """Uniform grid with the strike K = 1 on a node."""
    return build_grid(GridConfig(x_max=16.0, n_x=800, n_t=800))
