"""Finite-difference residual |u_t + (1/2) sigma^2 u_xx| of a candidate solution."""

from __future__ import annotations

from typing import Callable

import numpy as np

from src.config import get_config
from src.models.volatility import VolatilityModel
from src.pde.models import PDESolution

AnalyticSurface = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _solution_residual(solution: PDESolution, model: VolatilityModel, t_exclusion: float) -> np.ndarray:
    x, t, u = solution.grid.x_nodes, solution.grid.t_nodes, solution.values
    keep_t = t <= solution.grid.T - t_exclusion
    if not np.any(keep_t):
        return np.zeros(0)
    u_t = np.gradient(u, t, axis=1)
    h_minus = np.diff(x)[:-1][:, None]
    h_plus = np.diff(x)[1:][:, None]
    slopes = np.diff(u, axis=0) / np.diff(x)[:, None]
    u_xx = 2.0 * (slopes[1:] - slopes[:-1]) / (h_minus + h_plus)
    a = 0.5 * np.asarray(model(x[1:-1]), dtype=float) ** 2
    res = u_t[1:-1] + a[:, None] * u_xx
    return np.abs(res[:, keep_t])


def _analytic_residual(
    surface: AnalyticSurface,
    model: VolatilityModel,
    xs: np.ndarray,
    ts: np.ndarray,
    h: float,
) -> np.ndarray:
    xx, tt = np.meshgrid(xs, ts, indexing="ij")
    u = surface(xx, tt)
    u_t = (surface(xx, tt + h) - surface(xx, tt - h)) / (2.0 * h)
    u_xx = (surface(xx + h, tt) - 2.0 * u + surface(xx - h, tt)) / h**2
    a = 0.5 * np.asarray(model(xs), dtype=float) ** 2
    return np.abs(u_t + a[:, None] * u_xx)


def pde_residual(
    surface: PDESolution | AnalyticSurface,
    model: VolatilityModel,
    *,
    probe_x: np.ndarray | list[float] | None = None,
    probe_t: np.ndarray | list[float] | None = None,
    h: float = 1e-3,
    T: float = 1.0,
    t_exclusion: float | None = None,
) -> float:
    """Maximum absolute residual over interior probe points with t <= T - t_exclusion.

    A PDESolution is probed on its own interior nodes. An analytic surface
    ``u(x, t)`` is probed on ``probe_x`` x ``probe_t`` with central differences
    of step ``h``.
    """
    excl = get_config().pde.residual_t_exclusion if t_exclusion is None else t_exclusion
    if isinstance(surface, PDESolution):
        res = _solution_residual(surface, model, excl)
    else:
        xs = np.asarray(probe_x if probe_x is not None else np.linspace(0.1, 4.0, 40), dtype=float)
        ts = np.asarray(probe_t if probe_t is not None else np.linspace(h, T - excl, 20), dtype=float)
        if np.any(xs - h <= 0):
            raise ValueError("probe points must stay at least h above 0")
        ts = ts[ts <= T - excl]
        res = _analytic_residual(surface, model, xs, ts, h)
    return float(np.max(res)) if res.size else 0.0
