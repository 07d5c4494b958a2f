"""The convex Lyapunov function

    Psi(x) = x                                          for x <= 1
    Psi(x) = x + int_1^x u / sigma^2(u) (x - u) du      for x >= 1

Psi'' = x / sigma^2 above 1, so (1/2) sigma^2 Psi'' = x / 2 and Psi(x)/x grows
without bound exactly when int_1^inf x / sigma^2 diverges.
"""

from __future__ import annotations

import math

import numpy as np
import structlog
from scipy.interpolate import PchipInterpolator

from src.condition.models import PsiPoint, PsiProfile, PsiTrend
from src.condition.quadrature import cumulative_integrals, integrate_interval
from src.config import get_config
from src.errors import ModelValidationError
from src.models.volatility import VolatilityModel

logger = structlog.get_logger(__name__)

_TABLE_POINTS = 2049


def _power_integral(k: float, x: np.ndarray) -> np.ndarray:
    """int_1^x u^k du."""
    if k == -1.0:
        return np.log(x)
    return (x ** (k + 1.0) - 1.0) / (k + 1.0)


def psi_cev_closed_form(alpha: float, p: float, x: np.ndarray | float) -> np.ndarray | float:
    """Psi for sigma = alpha x^p: x + alpha^-2 [x I(1-2p) - I(2-2p)] above 1."""
    arr = np.asarray(x, dtype=float)
    above = np.maximum(arr, 1.0)
    with np.errstate(all="ignore"):
        inner = (above * _power_integral(1.0 - 2.0 * p, above) - _power_integral(2.0 - 2.0 * p, above)) / alpha**2
    out = np.where(arr > 1.0, arr + inner, arr)
    return float(out) if arr.ndim == 0 else out


def psi(model: VolatilityModel, x: float, closed_form: bool = True) -> float:
    """Psi(x) for a single point; CEV models use the closed form unless disabled."""
    if x < 0:
        raise ValueError(f"Psi is defined for x >= 0, got {x}")
    if x <= 1.0:
        return float(x)
    cev = model.cev_parameters
    if closed_form and cev is not None:
        return float(psi_cev_closed_form(cev[0], cev[1], x))

    def integrand(u: float) -> float:
        return u / model(u) ** 2 * (x - u)

    try:
        return x + integrate_interval(integrand, 1.0, x, get_config().quadrature, label="psi")
    except ZeroDivisionError:
        raise ModelValidationError(f"sigma vanishes inside [1, {x:g}] ({model.describe()})") from None


def psi_values(model: VolatilityModel, xs: np.ndarray) -> np.ndarray:
    """Vectorised Psi for Monte Carlo functionals.

    Non-CEV models tabulate F1 = int u/sigma^2 and F2 = int u^2/sigma^2 on a
    geometric table and interpolate (Psi = x + x F1 - F2); accuracy is that of
    the interpolant, which is ample for expectation bounds.
    """
    arr = np.asarray(xs, dtype=float)
    cev = model.cev_parameters
    if cev is not None:
        return np.asarray(psi_cev_closed_form(cev[0], cev[1], arr))
    out = arr.copy()
    above = arr > 1.0
    if not np.any(above):
        return out
    top = float(np.max(arr[above]))
    table = np.geomspace(1.0, top, _TABLE_POINTS)
    quad_cfg = get_config().quadrature
    try:
        f1 = cumulative_integrals(lambda u: u / model(u) ** 2, 1.0, table, quad_cfg, "psi_f1")
        f2 = cumulative_integrals(lambda u: u * u / model(u) ** 2, 1.0, table, quad_cfg, "psi_f2")
    except ZeroDivisionError:
        raise ModelValidationError(f"sigma vanishes inside [1, {top:g}] ({model.describe()})") from None
    log_table = np.log(table)
    f1_at = PchipInterpolator(log_table, f1)(np.log(arr[above]))
    f2_at = PchipInterpolator(log_table, f2)(np.log(arr[above]))
    out[above] = arr[above] + arr[above] * f1_at - f2_at
    return out


def psi_growth_profile(
    model: VolatilityModel,
    xs: np.ndarray | list[float] | None = None,
    closed_form: bool = True,
) -> PsiProfile:
    """Psi(x)/x on a grid in [1, inf) with a Diverging / Plateauing trend.

    The trend regresses log increments of the ratio against log x on the upper
    half of the grid; a slope above -epsilon means the increments are not
    summable (Diverging). Plateauing limits add the geometric tail of the
    increments to the last ratio.
    """
    grid = np.asarray(xs if xs is not None else np.geomspace(1.0, 1e6, 61), dtype=float)
    if grid.size == 0 or np.any(grid < 1.0) or np.any(np.diff(grid) <= 0):
        raise ValueError("Psi profile grid must be ascending and inside [1, inf)")
    eps = get_config().condition.epsilon_margin

    psis = np.array([psi(model, float(x), closed_form=closed_form) for x in grid])
    ratios = psis / grid
    points = [PsiPoint(x=float(x), psi=float(v), ratio=float(r)) for x, v, r in zip(grid, psis, ratios)]
    increments = np.diff(ratios)
    monotone_ok = bool(np.all(increments >= -1e-12 * np.maximum(1.0, np.abs(ratios[1:]))))

    if increments.size == 0 or np.all(increments <= 0):
        return PsiProfile(
            model=model.describe(),
            points=points,
            monotone_ok=monotone_ok,
            trend=PsiTrend.PLATEAUING,
            limit_estimate=float(ratios[-1]),
            notes="no positive increments on the grid",
        )

    take = max(2, increments.size // 2)
    tail_inc, tail_x = increments[-take:], grid[1:][-take:]
    usable = tail_inc > 0
    if np.count_nonzero(usable) < 2:
        slope = -math.inf
    else:
        slope = float(np.polyfit(np.log(tail_x[usable]), np.log(tail_inc[usable]), 1)[0])

    if slope > -eps:
        trend, limit = PsiTrend.DIVERGING, None
    else:
        trend = PsiTrend.PLATEAUING
        if math.isinf(slope):
            limit = float(ratios[-1])
        else:
            q = (grid[-1] / grid[-2]) ** slope
            limit = float(ratios[-1] + increments[-1] * q / (1.0 - q))

    profile = PsiProfile(
        model=model.describe(),
        points=points,
        monotone_ok=monotone_ok,
        trend=trend,
        increment_slope=None if math.isinf(slope) else slope,
        limit_estimate=limit,
    )
    if not monotone_ok:
        logger.warning("psi_ratio_not_monotone", model=profile.model)
    return profile
