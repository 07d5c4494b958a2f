"""The martingale defect u*(x, t) = x - E[X_T] on a grid, and the u + lambda u* family."""

from __future__ import annotations

import numpy as np
import structlog
from scipy.interpolate import RegularGridInterpolator

from src.condition.classifier import classify_martingale
from src.condition.models import ConditionReport, Verdict
from src.models.payoff import PayoffSpec
from src.models.volatility import VolatilityModel
from src.pde.models import DefectMethod, DefectProfile, Grid, PDESolution
from src.sde.closed_form import defect_closed_form
from src.sde.estimators import estimate_minimal_price, extrapolate_ladder
from src.sde.models import MonteCarloParams

logger = structlog.get_logger(__name__)

DEFAULT_LADDER = (4, 8, 16, 32, 64)


def _lattice_defect(
    model: VolatilityModel,
    grid: Grid,
    params: MonteCarloParams,
    ladder: tuple[int, ...],
    lattice: tuple[int, int],
) -> np.ndarray:
    """Killed-path ladder on a coarse (x, t) lattice, bilinearly interpolated to the grid."""
    n_lx, n_lt = lattice
    lx = np.linspace(0.0, grid.x_max, n_lx + 1)
    lt = np.linspace(grid.t0, grid.T, n_lt + 1)
    table = np.zeros((lx.size, lt.size))
    identity = PayoffSpec.identity()
    for i, x in enumerate(lx[1:], start=1):
        for j, t in enumerate(lt[:-1]):
            estimates = estimate_minimal_price(model, identity, float(x), float(t), grid.T, ladder, params)
            table[i, j] = x - extrapolate_ladder(estimates)
    interp = RegularGridInterpolator((lx, lt), table)
    xx, tt = np.meshgrid(grid.x_nodes, grid.t_nodes, indexing="ij")
    values = interp(np.stack([xx.ravel(), tt.ravel()], axis=-1)).reshape(xx.shape)
    values[0, :] = 0.0
    values[:, -1] = 0.0
    return values


def defect_profile(
    model: VolatilityModel,
    grid: Grid,
    condition: ConditionReport | None = None,
    params: MonteCarloParams | None = None,
    ladder: tuple[int, ...] = DEFAULT_LADDER,
    lattice: tuple[int, int] = (8, 4),
) -> DefectProfile:
    """u* on ``grid``: zero for martingales, closed form for alpha x^2, killed-path ladder otherwise.

    The ladder fallback needs ``params``; each lattice node extrapolates its
    minimal-price ladder to the limit.
    """
    report = condition or classify_martingale(model)
    warning = None
    if report.verdict == Verdict.INCONCLUSIVE:
        warning = f"condition verdict is inconclusive for {model.describe()}; defect is an estimate only"
        logger.warning("defect_condition_inconclusive", model=model.describe())

    if report.verdict == Verdict.MARTINGALE:
        values = np.zeros((grid.x_nodes.size, grid.t_nodes.size))
        method = DefectMethod.ZERO
    elif (closed_form := defect_closed_form(model)) is not None:
        xx, tt = np.meshgrid(grid.x_nodes, grid.t_nodes, indexing="ij")
        values = closed_form(xx, grid.T - tt)
        method = DefectMethod.CLOSED_FORM
    else:
        if params is None:
            raise ValueError(f"Monte Carlo parameters are required for the defect of {model.describe()}")
        values = _lattice_defect(model, grid, params, ladder, lattice)
        method = DefectMethod.MINIMAL_PRICE_LADDER

    logger.info("defect_profile_built", model=model.describe(), method=method.value)
    return DefectProfile(grid=grid, values=values, method=method, verdict=report.verdict.value, warning=warning)


def add_defect_solution(u: PDESolution, defect: DefectProfile, lam: float) -> PDESolution:
    """u + lam u*; raises GridMismatchError unless both live on the same grid."""
    u.grid.require_match(defect.grid)
    values = u.values + lam * defect.values
    values[:, -1] = u.values[:, -1]
    values[0, :] = u.values[0, :]
    return PDESolution(
        grid=u.grid,
        values=values,
        bc=u.bc,
        theta=u.theta,
        metadata={**u.metadata, "defect_lambda": lam, "defect_method": defect.method.value},
    )
