"""Monte Carlo estimators built on simulate_paths."""

from __future__ import annotations

import numpy as np
import structlog

from src.condition.psi import psi, psi_values
from src.errors import SchemeError
from src.models.payoff import GrowthKind, PayoffKind, PayoffSpec, classify_growth
from src.models.volatility import VolatilityModel
from src.sde.models import (
    MCEstimate,
    MonteCarloParams,
    PathBatch,
    PsiBoundEntry,
    PsiBoundReport,
    Scheme,
    StoppingSpec,
)
from src.sde.simulator import simulate_paths

logger = structlog.get_logger(__name__)


def default_scheme(model: VolatilityModel) -> Scheme:
    if model.has_inverse_bessel_oracle:
        return Scheme.INVERSE_BESSEL_EXACT
    return Scheme.EULER_ABSORBED


def _check_horizon(t: float, T: float) -> None:
    if T < t:
        raise ValueError(f"T must not precede t, got t={t}, T={T}")


def _terminal(
    model: VolatilityModel,
    x: float,
    t: float,
    T: float,
    params: MonteCarloParams,
    scheme: Scheme,
    stopping: StoppingSpec | None = None,
    path_functional: bool = False,
    stop_above: float | None = None,
) -> PathBatch:
    # the exact law needs a time grid only when a path functional is observed
    if scheme == Scheme.INVERSE_BESSEL_EXACT and not path_functional and stopping is None:
        n_steps = 1
    else:
        n_steps = params.steps_for(T - t)
    return simulate_paths(
        model,
        x,
        t,
        T,
        n_steps,
        params.n_paths,
        params.seed,
        stopping,
        scheme=scheme,
        workers=params.workers,
        block_size=params.block_size,
        stop_above=stop_above if scheme == Scheme.EULER_ABSORBED else None,
    )


def _warn_if_superlinear(payoff: PayoffSpec) -> None:
    growth = payoff.growth or classify_growth(payoff)
    if growth.kind == GrowthKind.SUPERLINEAR:
        logger.warning("superlinear_payoff", payoff=payoff.describe(), tail_exponent=growth.tail_exponent)


def estimate_payoff_expectation(
    model: VolatilityModel,
    payoff: PayoffSpec,
    x: float,
    t: float,
    T: float,
    params: MonteCarloParams,
) -> MCEstimate:
    """Plain Monte Carlo estimate of E[g(X_T)] started at (t, x)."""
    _check_horizon(t, T)
    label = f"E[{payoff.describe()}(X_T)]"
    if payoff.kind == PayoffKind.CONSTANT:
        return MCEstimate.exact(float(payoff.constant), seed=params.seed, label=label)  # type: ignore[arg-type]
    if T == t:
        return MCEstimate.exact(float(payoff(x)), seed=params.seed, label=label)
    _warn_if_superlinear(payoff)

    scheme = default_scheme(model)
    batch = _terminal(model, x, t, T, params, scheme)
    estimate = MCEstimate.from_samples(
        payoff(batch.terminal_values),
        scheme=scheme,
        seed=params.seed,
        n_steps=batch.n_steps,
        label=label,
    )
    logger.info("payoff_estimated", label=label, mean=estimate.mean, stderr=estimate.stderr, scheme=scheme.value)
    return estimate


def martingale_defect(
    model: VolatilityModel,
    x: float,
    t: float,
    T: float,
    params: MonteCarloParams,
    force_euler: bool = False,
) -> MCEstimate:
    """x - E[X_T] with its standard error.

    The absorbed Euler chain has conditional mean equal to its current state,
    so its mean is exactly x and it cannot show a defect. It is only used when
    ``force_euler`` is set.
    """
    _check_horizon(t, T)
    label = "x - E[X_T]"
    if T == t:
        return MCEstimate.exact(0.0, seed=params.seed, label=label)
    if model.has_inverse_bessel_oracle:
        scheme = Scheme.INVERSE_BESSEL_EXACT
    elif force_euler:
        scheme = Scheme.EULER_ABSORBED
        logger.warning("defect_forced_euler", model=model.describe())
    else:
        raise SchemeError(
            f"naive Euler cannot estimate the martingale defect of {model.describe()}; "
            "use estimate_minimal_price or force the Euler scheme explicitly"
        )
    batch = _terminal(model, x, t, T, params, scheme)
    estimate = MCEstimate.from_samples(
        x - batch.terminal_values,
        scheme=scheme,
        seed=params.seed,
        n_steps=batch.n_steps,
        label=label,
        metadata={"forced_euler": force_euler and scheme == Scheme.EULER_ABSORBED},
    )
    logger.info("defect_estimated", mean=estimate.mean, stderr=estimate.stderr, scheme=scheme.value)
    return estimate


def put_call_parity_gap(
    model: VolatilityModel,
    strike: float,
    x: float,
    t: float,
    T: float,
    params: MonteCarloParams,
) -> MCEstimate:
    """C - P - (x - K) from one set of terminal values; -u*(x, t) for minimal prices."""
    _check_horizon(t, T)
    if strike <= 0:
        raise ValueError(f"strike must be positive, got {strike}")
    label = f"C - P - (x - K), K={strike:g}"
    if T == t:
        return MCEstimate.exact(0.0, seed=params.seed, label=label)
    scheme = default_scheme(model)
    batch = _terminal(model, x, t, T, params, scheme)
    xt = batch.terminal_values
    samples = np.maximum(xt - strike, 0.0) - np.maximum(strike - xt, 0.0) - (x - strike)
    return MCEstimate.from_samples(samples, scheme=scheme, seed=params.seed, n_steps=batch.n_steps, label=label)


def estimate_minimal_price(
    model: VolatilityModel,
    payoff: PayoffSpec,
    x: float,
    t: float,
    T: float,
    ladder: list[int] | tuple[int, ...],
    params: MonteCarloParams,
) -> list[MCEstimate]:
    """E[g(X_T) 1{max X < n}] for each n in ``ladder``, from one shared set of paths.

    Sharing paths makes the ladder nondecreasing in n for nonnegative g; the
    estimates increase to the minimal solution E[g(X_T)].
    """
    _check_horizon(t, T)
    levels = list(ladder)
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] < 1:
        raise ValueError(f"ladder must be strictly ascending positive levels, got {levels}")
    if T == t:
        g = float(payoff(x))
        return [
            MCEstimate.exact(g if x < n else 0.0, seed=params.seed, label=f"n={n}", metadata={"level": n})
            for n in levels
        ]

    scheme = default_scheme(model)
    # a path is worth nothing to any rung once its running max reaches the top level
    batch = _terminal(model, x, t, T, params, scheme, path_functional=True, stop_above=float(levels[-1]))
    g = payoff(batch.terminal_values)
    if np.any(g < 0):
        raise ValueError(f"payoff must be nonnegative, got min {float(np.min(g))}")
    estimates = [
        MCEstimate.from_samples(
            np.where(batch.running_max < n, g, 0.0),
            scheme=scheme,
            seed=params.seed,
            n_steps=batch.n_steps,
            label=f"n={n}",
            metadata={
                "level": n,
                "killed": int(np.count_nonzero(batch.running_max >= n)),
                "overflowed": batch.overflow_count,
            },
        )
        for n in levels
    ]
    logger.info(
        "minimal_price_ladder",
        model=model.describe(),
        payoff=payoff.describe(),
        means=[round(e.mean, 6) for e in estimates],
    )
    return estimates


def extrapolate_ladder(estimates: list[MCEstimate]) -> float:
    """Limit of a nondecreasing ladder assuming geometric decay of its increments."""
    if not estimates:
        raise ValueError("cannot extrapolate an empty ladder")
    means = [e.mean for e in estimates]
    if len(means) < 3:
        return means[-1]
    d_prev, d_last = means[-2] - means[-3], means[-1] - means[-2]
    if d_prev <= 0 or d_last <= 0 or d_last >= d_prev:
        return means[-1]
    q = d_last / d_prev
    return means[-1] + d_last * q / (1.0 - q)


def psi_bound_check(
    model: VolatilityModel,
    x: float,
    t: float,
    T: float,
    stopping: StoppingSpec,
    params: MonteCarloParams,
) -> PsiBoundReport:
    """Check E[Psi(X_tau_n)] <= Psi(x) + x (T - t) / 2 within 3 standard errors."""
    _check_horizon(t, T)
    psi_x = psi(model, x)
    bound = psi_x + 0.5 * x * (T - t)

    if T == t:
        entries = [
            PsiBoundEntry(
                level=n,
                estimate=MCEstimate.exact(psi_x, seed=params.seed, label=f"n={n}"),
                exited_upper_fraction=0.0,
                passed=True,
            )
            for n in stopping.levels
        ]
        return PsiBoundReport(
            model=model.describe(), x=x, t=t, T=T, psi_x=psi_x, bound=bound, scheme=None, entries=entries
        )

    scheme = default_scheme(model)
    batch = _terminal(model, x, t, T, params, scheme, stopping)
    entries = []
    for record in batch.barrier_records:
        est = MCEstimate.from_samples(
            psi_values(model, record.stopped_values),
            scheme=scheme,
            seed=params.seed,
            n_steps=batch.n_steps,
            label=f"n={record.level}",
        )
        passed = est.mean <= bound + 3.0 * est.stderr
        if not passed:
            logger.warning("psi_bound_violated", level=record.level, mean=est.mean, bound=bound, stderr=est.stderr)
        entries.append(
            PsiBoundEntry(
                level=record.level,
                estimate=est,
                exited_upper_fraction=float(np.mean(record.exited_upper)),
                passed=passed,
            )
        )
    return PsiBoundReport(
        model=model.describe(), x=x, t=t, T=T, psi_x=psi_x, bound=bound, scheme=scheme, entries=entries
    )
