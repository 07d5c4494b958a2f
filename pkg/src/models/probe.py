"""Finite probe grids on (0, inf)."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.config import get_config


class ProbeGrid(BaseModel):
    """Points at which heuristics (positivity, growth, Hoelder) are evaluated."""

    lo: float = Field(gt=0.0)
    hi: float = Field(gt=0.0)
    n: int = Field(default=200, ge=2)
    spacing: Literal["geometric", "uniform"] = "geometric"

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_order(self) -> ProbeGrid:
        if self.hi <= self.lo:
            raise ValueError(f"probe grid needs lo < hi, got [{self.lo}, {self.hi}]")
        return self

    def points(self) -> np.ndarray:
        if self.spacing == "geometric":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


def default_probe() -> ProbeGrid:
    """Geometric grid 0.01 .. 1e6 (200 points) unless overridden by the environment."""
    cfg = get_config().probe
    return ProbeGrid(lo=cfg.probe_min, hi=cfg.probe_max, n=cfg.probe_points)


def growth_probe() -> ProbeGrid:
    cfg = get_config().probe
    return ProbeGrid(lo=cfg.growth_min, hi=cfg.probe_max, n=cfg.growth_points)
