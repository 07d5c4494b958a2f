"""Uniqueness gap: how far two far-field conditions pull the solution apart as x_max grows.

When the martingale condition holds, every linear-growth boundary treatment
approximates the one solution and the gap shrinks with x_max. When it fails,
a boundary fed by the minimal solution and one reproducing u = x stay apart
by u*(x, t) however far the boundary is pushed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import structlog

from src.config import get_config
from src.models.payoff import PayoffSpec, classify_growth
from src.models.volatility import VolatilityModel
from src.pde.grid import build_grid, scaled_n_x
from src.pde.models import FarFieldBC, GapReport, GapRung, GapVerdict, GridConfig
from src.pde.solver import solve_cauchy

logger = structlog.get_logger(__name__)

VANISHING_THRESHOLD = 1e-2
PERSISTENCE_TOLERANCE = 0.10
_MONOTONE_SLACK = 1e-12


def classify_gaps(gaps: list[float]) -> tuple[GapVerdict, float | None, str]:
    """VanishingGap, PersistentGap(level) or Undetermined from the per-rung gaps."""
    if not gaps:
        return GapVerdict.UNDETERMINED, None, "no rungs"
    nonincreasing = all(b <= a + _MONOTONE_SLACK for a, b in zip(gaps, gaps[1:]))
    if nonincreasing and gaps[-1] < VANISHING_THRESHOLD:
        return GapVerdict.VANISHING_GAP, None, f"final gap {gaps[-1]:.3g} < {VANISHING_THRESHOLD:g}"
    if len(gaps) >= 2:
        prev, last = gaps[-2], gaps[-1]
        if abs(last - prev) <= PERSISTENCE_TOLERANCE * max(prev, last):
            return GapVerdict.PERSISTENT_GAP, last, f"last two gaps agree within {PERSISTENCE_TOLERANCE:.0%}"
    return GapVerdict.UNDETERMINED, None, "gaps neither vanish nor stabilise on this ladder"


def _solve_rung(
    model: VolatilityModel,
    payoff: PayoffSpec,
    bc_pair: tuple[FarFieldBC, FarFieldBC],
    base: GridConfig,
    x_max: float,
    reference_xs: list[float],
    theta: float | None,
) -> GapRung:
    config = base.model_copy(update={"x_max": x_max, "n_x": scaled_n_x(base, x_max)})
    grid = build_grid(config)
    sol_a = solve_cauchy(model, payoff, grid, bc_pair[0], theta)
    sol_b = solve_cauchy(model, payoff, grid, bc_pair[1], theta)
    u_a = [float(sol_a.value_at(x)) for x in reference_xs]
    u_b = [float(sol_b.value_at(x)) for x in reference_xs]
    return GapRung(
        x_max=x_max,
        n_x=config.n_x,
        reference_xs=reference_xs,
        u_a=u_a,
        u_b=u_b,
        gaps=[abs(a - b) for a, b in zip(u_a, u_b)],
    )


def uniqueness_gap_study(
    model: VolatilityModel,
    payoff: PayoffSpec,
    bc_pair: tuple[FarFieldBC, FarFieldBC],
    ladder: list[float] | tuple[float, ...] = (8.0, 16.0, 32.0),
    reference_xs: list[float] | tuple[float, ...] = (1.0,),
    base: GridConfig | None = None,
    theta: float | None = None,
    workers: int = 4,
) -> GapReport:
    """Solve under both conditions on each x_max rung; the rung gap is the largest over reference points.

    ``base`` fixes the spacing (and time steps) that every rung keeps.
    """
    rungs_x = [float(v) for v in ladder]
    if not rungs_x or any(b <= a for a, b in zip(rungs_x, rungs_x[1:])):
        raise ValueError(f"x_max ladder must be strictly ascending, got {rungs_x}")
    refs = [float(x) for x in reference_xs]
    if any(x <= 0 or x >= rungs_x[0] for x in refs):
        raise ValueError(f"reference points must lie inside (0, {rungs_x[0]:g})")
    base_config = base or GridConfig()

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [
            pool.submit(_solve_rung, model, payoff, bc_pair, base_config, x_max, refs, theta) for x_max in rungs_x
        ]
        rungs = [f.result() for f in futures]

    gaps = [rung.max_gap for rung in rungs]
    verdict, level, notes = classify_gaps(gaps)
    growth = payoff.growth or classify_growth(payoff)
    report = GapReport(
        model=model.describe(),
        payoff=payoff.describe(),
        payoff_growth=growth.kind.value,
        bc_a=bc_pair[0].name(),
        bc_b=bc_pair[1].name(),
        theta=get_config().pde.theta if theta is None else theta,
        rungs=rungs,
        verdict=verdict,
        level=level,
        notes=notes,
    )
    logger.info("gap_study_done", model=report.model, payoff=report.payoff, verdict=verdict.value, gaps=gaps)
    return report
