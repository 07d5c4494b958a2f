"""Space-time grids for the backward solver."""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from src.config import PDEConfig, get_config
from src.pde.models import Grid, GridConfig, Spacing


def grid_config_from_settings(
    T: float = 1.0,
    t0: float = 0.0,
    config: PDEConfig | None = None,
    **overrides: Any,
) -> GridConfig:
    cfg = config or get_config().pde
    values = {"x_max": cfg.x_max, "n_x": cfg.n_x, "n_t": cfg.n_t, "T": T, "t0": t0, "spacing": Spacing(cfg.spacing)}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return GridConfig(**values)


def _log_uniform_nodes(x_max: float, n_x: int) -> np.ndarray:
    """Uniform patch on [0, 1] and geometric spacing on [1, x_max], split 1 : ln(x_max)."""
    if x_max <= 1.0:
        return np.linspace(0.0, x_max, n_x + 1)
    n_patch = min(n_x - 1, max(2, round(n_x / (1.0 + math.log(x_max)))))
    patch = np.linspace(0.0, 1.0, n_patch + 1)
    tail = np.geomspace(1.0, x_max, n_x - n_patch + 1)
    nodes = np.concatenate([patch, tail[1:]])
    nodes[-1] = x_max
    return nodes


def build_grid(config: GridConfig) -> Grid:
    if config.spacing == Spacing.LOG_UNIFORM:
        x_nodes = _log_uniform_nodes(config.x_max, config.n_x)
    else:
        x_nodes = np.linspace(0.0, config.x_max, config.n_x + 1)
    t_nodes = np.linspace(config.t0, config.T, config.n_t + 1)
    return Grid(x_nodes=x_nodes, t_nodes=t_nodes, spacing=config.spacing)


def scaled_n_x(base: GridConfig, x_max: float) -> int:
    """Interval count keeping the spacing of ``base`` comparable at a new x_max."""
    if base.spacing == Spacing.LOG_UNIFORM and x_max > 1.0 and base.x_max > 1.0:
        ratio = (1.0 + math.log(x_max)) / (1.0 + math.log(base.x_max))
    else:
        ratio = x_max / base.x_max
    return max(4, round(base.n_x * ratio))
