"""Standing assumptions on sigma: positivity, local integrability of sigma^-2, Hoelder-1/2."""

from __future__ import annotations

import numpy as np
import orjson
import structlog
from pydantic import BaseModel, Field

from src.condition.quadrature import integrate_interval
from src.config import get_config
from src.errors import ModelValidationError, QuadratureDomainError
from src.models.probe import ProbeGrid, default_probe
from src.models.volatility import VolatilityModel

logger = structlog.get_logger(__name__)

HOLDER_TARGET = 0.5
HOLDER_SLACK = 0.05
_HOLDER_OFFSETS = np.geomspace(1e-1, 1e-8, 15)


class IntervalIntegral(BaseModel):
    a: float
    b: float
    value: float | None = Field(description="int_a^b sigma^-2, None when it does not exist")
    finite: bool


class HolderEstimate(BaseModel):
    x: float
    exponent: float


class AssumptionReport(BaseModel):
    """Outcome of the assumption checks; failures are reported, not raised."""

    positivity_ok: bool
    nonpositive_at: list[float] = Field(default_factory=list)
    local_integrability_ok: bool
    interval_integrals: list[IntervalIntegral] = Field(default_factory=list)
    holder_half_estimate: float
    holder_half_ok: bool
    holder_estimates: list[HolderEstimate] = Field(default_factory=list)
    notes: str = ""

    model_config = {"frozen": True}

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()


def estimate_holder_exponent(model: VolatilityModel, x: float) -> float:
    """Slope of log|sigma(x+h) - sigma(x)| against log h for h -> 0, capped at 1.

    At x = 0 the offsets are absolute; elsewhere they are relative to x.
    """
    h = _HOLDER_OFFSETS if x == 0 else x * _HOLDER_OFFSETS
    diffs = np.abs(model(x + h) - model(x))
    usable = diffs > 0
    if np.count_nonzero(usable) < 2:
        return 1.0
    slope = float(np.polyfit(np.log(h[usable]), np.log(diffs[usable]), 1)[0])
    return min(slope, 1.0)


def validate_assumptions(model: VolatilityModel, probe: ProbeGrid | None = None) -> AssumptionReport:
    """Check the standing assumptions of the Cauchy problem on a finite probe grid.

    Only non-finite sigma values raise; every other failure lands in the report.
    Hoelder continuity is advisory: it matters for existence, not uniqueness.
    """
    grid = probe or default_probe()
    xs = grid.points()
    values = model(xs)
    if np.any(~np.isfinite(values)):
        x_bad = float(xs[np.argmax(~np.isfinite(values))])
        raise ModelValidationError(f"sigma is not finite at x={x_bad:g} ({model.describe()})")

    nonpositive = xs[values <= 0]
    positivity_ok = nonpositive.size == 0

    quad_cfg = get_config().quadrature
    integrals: list[IntervalIntegral] = []
    for a, b in zip(xs[:-1], xs[1:]):
        try:
            value = integrate_interval(lambda u: model(u) ** -2.0, float(a), float(b), quad_cfg, "sigma^-2")
            integrals.append(IntervalIntegral(a=a, b=b, value=value, finite=bool(np.isfinite(value))))
        except (QuadratureDomainError, ZeroDivisionError):
            integrals.append(IntervalIntegral(a=a, b=b, value=None, finite=False))
    local_integrability_ok = all(item.finite for item in integrals)

    holder_points = np.concatenate(([0.0], xs))
    holder = [HolderEstimate(x=float(x), exponent=estimate_holder_exponent(model, float(x))) for x in holder_points]
    worst = min(h.exponent for h in holder)
    holder_ok = worst >= HOLDER_TARGET - HOLDER_SLACK

    notes: list[str] = []
    if not positivity_ok:
        notes.append(f"sigma <= 0 at {nonpositive.size} probe point(s), first at x={nonpositive[0]:g}")
    if not local_integrability_ok:
        bad = next(item for item in integrals if not item.finite)
        notes.append(f"sigma^-2 not integrable on [{bad.a:g}, {bad.b:g}]")
    if not holder_ok:
        worst_x = min(holder, key=lambda h: h.exponent).x
        notes.append(f"estimated Hoelder exponent {worst:.3f} < 1/2 near x={worst_x:g} (advisory)")

    report = AssumptionReport(
        positivity_ok=positivity_ok,
        nonpositive_at=nonpositive[:20].tolist(),
        local_integrability_ok=local_integrability_ok,
        interval_integrals=integrals,
        holder_half_estimate=worst,
        holder_half_ok=holder_ok,
        holder_estimates=holder,
        notes="; ".join(notes),
    )
    logger.info(
        "assumptions_validated",
        model=model.describe(),
        positivity_ok=positivity_ok,
        local_integrability_ok=local_integrability_ok,
        holder_half_estimate=worst,
    )
    return report
