"""Central configuration loaded from environment variables."""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

_ENV_FILE = Path(__file__).resolve().parent.parent / ".env"


class LoggingConfig(BaseSettings):
    model_config = SettingsConfigDict(env_file=_ENV_FILE, extra="ignore")
    log_level: str = Field(default="WARNING", alias="CAUCHYLAB_LOG_LEVEL")
    log_format: Literal["console", "json"] = Field(default="console", alias="CAUCHYLAB_LOG_FORMAT")


class QuadratureConfig(BaseSettings):
    model_config = SettingsConfigDict(env_file=_ENV_FILE, extra="ignore")
    rel_tol: float = Field(default=1e-9, alias="CAUCHYLAB_QUAD_REL_TOL")
    max_subintervals: int = Field(default=10_000, alias="CAUCHYLAB_QUAD_MAX_SUBINTERVALS")


class ProbeConfig(BaseSettings):
    model_config = SettingsConfigDict(env_file=_ENV_FILE, extra="ignore")
    probe_min: float = Field(default=0.01, alias="CAUCHYLAB_PROBE_MIN")
    probe_max: float = Field(default=1e6, alias="CAUCHYLAB_PROBE_MAX")
    probe_points: int = Field(default=200, alias="CAUCHYLAB_PROBE_POINTS")
    growth_min: float = Field(default=1.0, alias="CAUCHYLAB_GROWTH_PROBE_MIN")
    growth_points: int = Field(default=121, alias="CAUCHYLAB_GROWTH_PROBE_POINTS")


class ConditionConfig(BaseSettings):
    model_config = SettingsConfigDict(env_file=_ENV_FILE, extra="ignore")
    epsilon_margin: float = Field(default=0.05, alias="CAUCHYLAB_EPSILON_MARGIN")
    tail_min: float = Field(default=10.0, alias="CAUCHYLAB_TAIL_MIN")
    tail_max: float = Field(default=1e6, alias="CAUCHYLAB_TAIL_MAX")
    tail_points: int = Field(default=121, alias="CAUCHYLAB_TAIL_POINTS")
    drift_tolerance: float = Field(default=0.05, alias="CAUCHYLAB_DRIFT_TOLERANCE")


class MonteCarloConfig(BaseSettings):
    model_config = SettingsConfigDict(env_file=_ENV_FILE, extra="ignore")
    paths: int = Field(default=100_000, alias="CAUCHYLAB_MC_PATHS")
    steps_per_unit_time: int = Field(default=2000, alias="CAUCHYLAB_MC_STEPS_PER_UNIT_TIME")
    block_size: int = Field(default=8192, alias="CAUCHYLAB_MC_BLOCK_SIZE")
    workers: int = Field(default=1, alias="CAUCHYLAB_MC_WORKERS")
    overflow_threshold: float = Field(default=1e300, alias="CAUCHYLAB_MC_OVERFLOW_THRESHOLD")
    overflow_max_fraction: float = Field(default=1e-2, alias="CAUCHYLAB_MC_OVERFLOW_MAX_FRACTION")


class PDEConfig(BaseSettings):
    model_config = SettingsConfigDict(env_file=_ENV_FILE, extra="ignore")
    x_max: float = Field(default=16.0, alias="CAUCHYLAB_PDE_X_MAX")
    n_x: int = Field(default=800, alias="CAUCHYLAB_PDE_N_X")
    n_t: int = Field(default=800, alias="CAUCHYLAB_PDE_N_T")
    theta: float = Field(default=0.5, alias="CAUCHYLAB_PDE_THETA")
    rannacher_steps: int = Field(default=4, alias="CAUCHYLAB_PDE_RANNACHER_STEPS")
    spacing: Literal["uniform", "log_uniform"] = Field(default="uniform", alias="CAUCHYLAB_PDE_SPACING")
    residual_t_exclusion: float = Field(default=0.01, alias="CAUCHYLAB_PDE_RESIDUAL_T_EXCLUSION")


class AppConfig:
    """Aggregated application configuration."""

    def __init__(self) -> None:
        self.logging = LoggingConfig()
        self.quadrature = QuadratureConfig()
        self.probe = ProbeConfig()
        self.condition = ConditionConfig()
        self.monte_carlo = MonteCarloConfig()
        self.pde = PDEConfig()


def get_config() -> AppConfig:
    """Create and return the application configuration."""
    return AppConfig()
