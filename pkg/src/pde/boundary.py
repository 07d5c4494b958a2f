"""Far-field boundary profiles fed by the stochastic representation."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from src.errors import SchemeError
from src.models.payoff import PayoffSpec
from src.models.volatility import VolatilityModel
from src.pde.models import FarFieldBC
from src.sde.closed_form import minimal_closed_form
from src.sde.estimators import estimate_minimal_price, extrapolate_ladder
from src.sde.models import MonteCarloParams


def minimal_profile(model: VolatilityModel, payoff: PayoffSpec) -> FarFieldBC:
    """u(x_max, t) from the closed-form minimal solution E[g(X_T)]."""
    surface = minimal_closed_form(model, payoff)
    if surface is None:
        raise SchemeError(f"no closed-form minimal solution for {model.describe()} with {payoff.describe()}")

    def profile(x_max: float, t_nodes: np.ndarray) -> np.ndarray:
        return surface(np.full(t_nodes.shape, x_max), t_nodes[-1] - t_nodes)

    return FarFieldBC.dirichlet_profile(profile, label="minimal-profile")


def monte_carlo_profile(
    model: VolatilityModel,
    payoff: PayoffSpec,
    params: MonteCarloParams,
    ladder: tuple[int, ...] = (32, 64, 128, 256),
    n_times: int = 8,
) -> FarFieldBC:
    """u(x_max, t) from extrapolated killed-path ladders at a few times, PCHIP in between."""

    def profile(x_max: float, t_nodes: np.ndarray) -> np.ndarray:
        T = float(t_nodes[-1])
        knots = np.linspace(float(t_nodes[0]), T, n_times + 1)
        levels = tuple(n for n in ladder if n > x_max) or (int(np.ceil(x_max)) * 2,)
        values = [
            extrapolate_ladder(estimate_minimal_price(model, payoff, x_max, float(t), T, levels, params))
            for t in knots[:-1]
        ]
        values.append(float(payoff(x_max)))
        return PchipInterpolator(knots, np.asarray(values))(t_nodes)

    return FarFieldBC.dirichlet_profile(profile, label="mc-profile")


def bc_from_name(name: str, model: VolatilityModel, payoff: PayoffSpec, params: MonteCarloParams | None = None) -> FarFieldBC:
    """dirichlet-payoff | zero-gamma | minimal-profile | mc-profile."""
    key = name.strip().lower().replace("_", "-")
    if key == "dirichlet-payoff":
        return FarFieldBC.dirichlet_payoff()
    if key == "zero-gamma":
        return FarFieldBC.zero_gamma()
    if key == "minimal-profile":
        return minimal_profile(model, payoff)
    if key == "mc-profile":
        if params is None:
            raise ValueError("mc-profile needs Monte Carlo parameters")
        return monte_carlo_profile(model, payoff, params)
    kinds = ", ".join(["dirichlet-payoff", "zero-gamma", "minimal-profile", "mc-profile"])
    raise ValueError(f"unknown boundary condition {name!r}; expected one of {kinds}")

