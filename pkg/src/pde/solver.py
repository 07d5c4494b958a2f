"""Backward theta-scheme for u_t + (1/2) sigma^2(x) u_xx = 0, u(x, T) = g(x), u(0, t) = g(0).

Each step solves for the increment d = u(t_{j-1}) - u(t_j):

    (I - theta dt L) d = dt L u(t_j)

with L the three-point second difference on the (possibly nonuniform) nodes,
written in flux form so that functions linear in x give L u = 0 exactly.
"""

from __future__ import annotations

import numpy as np
import structlog
from scipy.linalg import LinAlgError, solve_banded

from src.config import PDEConfig, get_config
from src.errors import ModelValidationError, SolverError
from src.models.payoff import PayoffSpec
from src.models.volatility import VolatilityModel
from src.pde.models import BCKind, FarFieldBC, Grid, PDESolution

logger = structlog.get_logger(__name__)


class _Operator:
    """Coefficients of L at interior nodes 1..M-1: (L u)_i = lo_i u_{i-1} + di_i u_i + up_i u_{i+1}."""

    def __init__(self, model: VolatilityModel, x: np.ndarray) -> None:
        h = np.diff(x)
        h_minus, h_plus = h[:-1], h[1:]
        interior = x[1:-1]
        sigma = np.asarray(model(interior), dtype=float)
        if not np.all(np.isfinite(sigma)):
            bad = float(interior[~np.isfinite(sigma)][0])
            raise ModelValidationError(f"sigma is not finite at x={bad!r} ({model.describe()})")
        weight = sigma**2 / (h_minus + h_plus)
        self.h = h
        self.h_minus = h_minus
        self.h_plus = h_plus
        self.lo = weight / h_minus
        self.up = weight / h_plus
        self.di = -(self.lo + self.up)
        self.weight = weight
        # linear extrapolation u_M = (1 + r) u_{M-1} - r u_{M-2}
        self.r = float(h[-1] / h[-2])

    def apply(self, u: np.ndarray) -> np.ndarray:
        slopes = np.diff(u) / self.h
        return self.weight * (slopes[1:] - slopes[:-1])


def _boundary_series(bc: FarFieldBC, payoff: PayoffSpec, grid: Grid) -> np.ndarray | None:
    if bc.kind == BCKind.ZERO_GAMMA:
        return None
    if bc.kind == BCKind.DIRICHLET_PAYOFF:
        return np.full(grid.t_nodes.size, float(payoff(grid.x_max)))
    assert bc.profile is not None
    values = np.asarray(bc.profile(grid.x_max, grid.t_nodes), dtype=float)
    if values.shape != grid.t_nodes.shape or not np.all(np.isfinite(values)):
        raise ValueError(f"boundary profile {bc.name()!r} must be finite on every t node")
    return values


def solve_cauchy(
    model: VolatilityModel,
    payoff: PayoffSpec,
    grid: Grid,
    bc: FarFieldBC,
    theta: float | None = None,
    rannacher_steps: int | None = None,
    config: PDEConfig | None = None,
) -> PDESolution:
    """March backward from T; theta=1 is fully implicit, theta=1/2 Crank-Nicolson.

    With theta < 1 the first ``rannacher_steps`` steps from T are fully implicit.
    """
    cfg = config or get_config().pde
    theta = cfg.theta if theta is None else theta
    startup = cfg.rannacher_steps if rannacher_steps is None else rannacher_steps
    if not 0.5 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [1/2, 1], got {theta}")

    x, t = grid.x_nodes, grid.t_nodes
    m = x.size - 1
    terminal = np.asarray(payoff(x), dtype=float)
    if not np.all(np.isfinite(terminal)):
        raise ValueError(f"payoff {payoff.describe()} is not finite on the grid")
    g0 = float(terminal[0])
    op = _Operator(model, x)
    boundary = _boundary_series(bc, payoff, grid)

    values = np.empty((x.size, t.size))
    values[:, -1] = terminal
    u = terminal.copy()
    ab = np.zeros((3, m - 1))

    for step, j in enumerate(range(t.size - 1, 0, -1)):
        dt = float(t[j] - t[j - 1])
        th = 1.0 if step < startup and theta < 1.0 else theta

        rhs = dt * op.apply(u)
        ab[0, 1:] = -th * dt * op.up[:-1]
        ab[1, :] = 1.0 - th * dt * op.di
        ab[2, :-1] = -th * dt * op.lo[1:]

        if boundary is not None:
            d_top = boundary[j - 1] - u[m]
            rhs[-1] += th * dt * op.up[-1] * d_top
        else:
            # d_M = (1 + r) d_{M-1} - r d_{M-2} + e, e = 0 once u_M follows the extrapolation
            r = op.r
            e = (1.0 + r) * u[m - 1] - r * u[m - 2] - u[m]
            ab[1, -1] = 1.0 - th * dt * (op.di[-1] + (1.0 + r) * op.up[-1])
            ab[2, -2] = -th * dt * (op.lo[-1] - r * op.up[-1])
            rhs[-1] += th * dt * op.up[-1] * e

        try:
            d = solve_banded((1, 1), ab, rhs, check_finite=False)
        except (LinAlgError, ValueError) as exc:
            raise SolverError(f"tridiagonal solve failed at step {step} (t={t[j - 1]:g}): {exc}") from exc

        u = u.copy()
        u[1:m] += d
        u[0] = g0
        if boundary is not None:
            u[m] = boundary[j - 1]
        else:
            u[m] = (1.0 + op.r) * u[m - 1] - op.r * u[m - 2]
        if not np.all(np.isfinite(u)):
            raise SolverError(f"non-finite values at step {step} (t={t[j - 1]:g}, theta={th})")
        values[:, j - 1] = u

    values[0, :] = g0
    logger.debug(
        "cauchy_solved",
        model=model.describe(),
        payoff=payoff.describe(),
        bc=bc.name(),
        n_x=grid.n_x,
        n_t=grid.n_t,
        theta=theta,
    )
    return PDESolution(
        grid=grid,
        values=values,
        bc=bc,
        theta=theta,
        metadata={
            "model": model.describe(),
            "payoff": payoff.describe(),
            "rannacher_steps": startup if theta < 1.0 else 0,
        },
    )
