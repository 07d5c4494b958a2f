"""Decide whether the sigma-diffusion is a martingale via int_1^inf x / sigma^2(x) dx.

The integral diverges exactly when the absorbed diffusion dX = sigma(X) dW is a
true martingale. For CEV models the answer is symbolic (p <= 1); otherwise it
is read off finite evidence: partial integrals plus a power-law fit of the
integrand's tail, with an explicit Inconclusive band around exponent 1.
"""

from __future__ import annotations

import math

import numpy as np
import structlog

from src.condition.models import ClassificationMethod, ConditionReport, PartialIntegral, Verdict
from src.condition.quadrature import cumulative_integrals, integrate_interval
from src.config import ConditionConfig, QuadratureConfig, get_config
from src.errors import ModelValidationError
from src.models.volatility import VolatilityModel

logger = structlog.get_logger(__name__)

PARTIAL_UPPER_LIMITS = np.array([10.0**k for k in range(1, 7)])


def _integrand(model: VolatilityModel):
    def f(x: float) -> float:
        return x / model(x) ** 2

    return f


def ds_partial_integral(model: VolatilityModel, upper: float, config: QuadratureConfig | None = None) -> float:
    """int_1^B x / sigma^2(x) dx to relative tolerance 1e-9; ``upper`` may be inf."""
    if not upper > 1:
        raise ValueError(f"upper limit must exceed 1, got {upper}")
    try:
        return integrate_interval(_integrand(model), 1.0, upper, config, label="x/sigma^2")
    except ZeroDivisionError:
        raise ModelValidationError(f"sigma vanishes inside [1, {upper:g}] ({model.describe()})") from None


def _cev_limit(alpha: float, p: float) -> float | None:
    if p <= 1:
        return None
    return 1.0 / (alpha**2 * (2.0 * p - 2.0))


def _fit_tail(xs: np.ndarray, integrand: np.ndarray) -> tuple[float, float, float]:
    """Least-squares fit log f = log c - beta log x; returns (beta, stderr(beta), log c)."""
    coeffs, cov = np.polyfit(np.log(xs), np.log(integrand), 1, cov=True)
    return float(-coeffs[0]), float(np.sqrt(max(cov[0, 0], 0.0))), float(coeffs[1])


def _check_tail_positive(model: VolatilityModel, xs: np.ndarray) -> np.ndarray:
    sigma = model(xs)
    if np.any(~np.isfinite(sigma)) or np.any(sigma <= 0):
        raise ModelValidationError(f"sigma must be positive and finite on [1, inf) ({model.describe()})")
    return xs / sigma**2


def classify_martingale(
    model: VolatilityModel,
    symbolic: bool = True,
    config: ConditionConfig | None = None,
) -> ConditionReport:
    """Classify ``model`` as Martingale, StrictLocalMartingale or Inconclusive.

    ``symbolic=False`` forces the numeric tail fit even for CEV models.
    """
    app = get_config()
    cfg = config or app.condition
    eps = cfg.epsilon_margin

    tail_xs = np.geomspace(cfg.tail_min, cfg.tail_max, cfg.tail_points)
    tail_f = _check_tail_positive(model, np.concatenate(([1.0], tail_xs)))[1:]
    try:
        partial = cumulative_integrals(_integrand(model), 1.0, PARTIAL_UPPER_LIMITS, app.quadrature, "x/sigma^2")
    except ZeroDivisionError:
        raise ModelValidationError(f"sigma vanishes on [1, inf) ({model.describe()})") from None
    partial_integrals = [PartialIntegral(upper=b, value=v) for b, v in zip(PARTIAL_UPPER_LIMITS, partial)]

    cev = model.cev_parameters
    if symbolic and cev is not None:
        alpha, p = cev
        verdict = Verdict.MARTINGALE if p <= 1 else Verdict.STRICT_LOCAL_MARTINGALE
        beta = 2.0 * p - 1.0
        report = ConditionReport(
            model=model.describe(),
            verdict=verdict,
            method=ClassificationMethod.SYMBOLIC_CEV,
            partial_integrals=partial_integrals,
            tail_exponent=beta,
            tail_exponent_band=(beta, beta),
            tail_drift=0.0,
            limit_value=_cev_limit(alpha, p),
            epsilon_margin=eps,
            notes=f"integrand alpha^-2 x^{1 - 2 * p:g}; diverges iff p <= 1",
        )
        logger.info("condition_classified", model=report.model, verdict=verdict.value, method="symbolic")
        return report

    beta, beta_se, log_c = _fit_tail(tail_xs, tail_f)
    half = len(tail_xs) // 2
    beta_lo_half, _, _ = _fit_tail(tail_xs[: half + 1], tail_f[: half + 1])
    beta_hi_half, _, _ = _fit_tail(tail_xs[half:], tail_f[half:])
    drift = abs(beta_hi_half - beta_lo_half)
    band = (beta - 1.96 * beta_se, beta + 1.96 * beta_se)

    limit_value: float | None = None
    if drift > cfg.drift_tolerance:
        verdict = Verdict.INCONCLUSIVE
        notes = f"tail exponent drifts by {drift:.3f} across the window; integrand is not yet power-law"
    elif beta <= 1 - eps:
        verdict = Verdict.MARTINGALE
        notes = f"fitted beta {beta:.4f} <= 1 - {eps:g}: integral diverges"
    elif beta >= 1 + eps:
        verdict = Verdict.STRICT_LOCAL_MARTINGALE
        last_b = float(PARTIAL_UPPER_LIMITS[-1])
        tail_mass = math.exp(log_c) * last_b ** (1.0 - beta) / (beta - 1.0)
        limit_value = float(partial[-1] + tail_mass)
        notes = f"fitted beta {beta:.4f} >= 1 + {eps:g}: integral converges"
    else:
        verdict = Verdict.INCONCLUSIVE
        notes = f"fitted beta {beta:.4f} within {eps:g} of 1"

    report = ConditionReport(
        model=model.describe(),
        verdict=verdict,
        method=ClassificationMethod.NUMERIC_TAIL_FIT,
        partial_integrals=partial_integrals,
        tail_exponent=beta,
        tail_exponent_band=band,
        tail_drift=drift,
        limit_value=limit_value,
        epsilon_margin=eps,
        notes=notes,
    )
    if verdict == Verdict.INCONCLUSIVE:
        logger.warning("condition_inconclusive", model=report.model, beta=beta, drift=drift)
    else:
        logger.info("condition_classified", model=report.model, verdict=verdict.value, method="numeric", beta=beta)
    return report
