"""Exact laws used as oracles and as far-field profiles.

- sigma(x) = alpha x  : zero-rate Black-Scholes with lognormal volatility alpha.
- sigma(x) = alpha x^2: X = Y / alpha with Y the reciprocal of a 3-d Bessel
  process started at 1 / (alpha x); E X_T = x (2 Phi(1 / (alpha x sqrt(tau))) - 1).
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.stats import norm

from src.models.payoff import PayoffKind, PayoffSpec
from src.models.volatility import VolatilityModel

Surface = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _broadcast(x: np.ndarray | float, tau: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(tau, dtype=float))


def inverse_bessel_mean(x: np.ndarray | float, tau: np.ndarray | float, alpha: float = 1.0) -> np.ndarray:
    """E[X_T] for sigma = alpha x^2 started at x with time to maturity tau."""
    xs, taus = _broadcast(x, tau)
    out = xs.copy()
    live = (xs > 0) & (taus > 0)
    arg = 1.0 / (alpha * xs[live] * np.sqrt(taus[live]))
    out[live] = xs[live] * (2.0 * norm.cdf(arg) - 1.0)
    return out


def inverse_bessel_defect(x: np.ndarray | float, tau: np.ndarray | float, alpha: float = 1.0) -> np.ndarray:
    """x - E[X_T] = 2 x Phi(-1 / (alpha x sqrt(tau))) for sigma = alpha x^2."""
    xs, taus = _broadcast(x, tau)
    out = np.zeros_like(xs)
    live = (xs > 0) & (taus > 0)
    arg = 1.0 / (alpha * xs[live] * np.sqrt(taus[live]))
    out[live] = 2.0 * xs[live] * norm.cdf(-arg)
    return out


def black_scholes(
    x: np.ndarray | float,
    tau: np.ndarray | float,
    strike: float,
    vol: float,
    kind: PayoffKind = PayoffKind.CALL,
) -> np.ndarray:
    """Zero-rate Black-Scholes call or put value; intrinsic at tau = 0 or x = 0."""
    xs, taus = _broadcast(x, tau)
    intrinsic = np.maximum(xs - strike, 0.0) if kind == PayoffKind.CALL else np.maximum(strike - xs, 0.0)
    out = np.array(intrinsic, dtype=float)
    live = (xs > 0) & (taus > 0)
    s, t = xs[live], taus[live]
    sd = vol * np.sqrt(t)
    d1 = (np.log(s / strike) + 0.5 * sd**2) / sd
    d2 = d1 - sd
    if kind == PayoffKind.CALL:
        out[live] = s * norm.cdf(d1) - strike * norm.cdf(d2)
    else:
        out[live] = strike * norm.cdf(-d2) - s * norm.cdf(-d1)
    return out


def minimal_closed_form(model: VolatilityModel, payoff: PayoffSpec) -> Surface | None:
    """Closed form of the minimal solution E[g(X_T)] as a function of (x, tau), if known."""
    cev = model.cev_parameters
    if payoff.kind == PayoffKind.CONSTANT:
        value = float(payoff.constant)  # type: ignore[arg-type]
        return lambda x, tau: np.full(_broadcast(x, tau)[0].shape, value)
    if cev is None:
        return None
    alpha, p = cev
    if p == 2.0 and payoff.kind == PayoffKind.IDENTITY:
        return lambda x, tau: inverse_bessel_mean(x, tau, alpha)
    if p == 1.0 and payoff.kind in (PayoffKind.CALL, PayoffKind.PUT):
        strike = float(payoff.strike)  # type: ignore[arg-type]
        return lambda x, tau: black_scholes(x, tau, strike, alpha, payoff.kind)
    if p <= 1.0 and payoff.kind == PayoffKind.IDENTITY:
        return lambda x, tau: _broadcast(x, tau)[0].copy()
    return None


def defect_closed_form(model: VolatilityModel) -> Surface | None:
    """u*(x, tau) = x - E[X_T] when known in closed form."""
    cev = model.cev_parameters
    if cev is None:
        return None
    alpha, p = cev
    if p == 2.0:
        return lambda x, tau: inverse_bessel_defect(x, tau, alpha)
    if p <= 1.0:
        return lambda x, tau: np.zeros(_broadcast(x, tau)[0].shape)
    return None
