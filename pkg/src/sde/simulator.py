"""Path simulation of dX = sigma(X) dW absorbed at zero.

Two schemes share one block-parallel driver:

- Euler-Maruyama with absorption, valid for any model;
- the exact inverse-Bessel construction for sigma = alpha x^2, either in one
  step to T (terminal law) or on a time grid (for barrier functionals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import structlog

from src.config import MonteCarloConfig, get_config
from src.errors import SchemeError, SimulationError
from src.models.volatility import VolatilityModel
from src.sde.models import BarrierRecord, PathBatch, RngDescriptor, Scheme, StoppingSpec
from src.sde.rng import block_generator, run_blocks

logger = structlog.get_logger(__name__)


@dataclass
class _BlockResult:
    terminal: np.ndarray
    absorbed: np.ndarray
    running_max: np.ndarray
    overflow: np.ndarray
    exit_times: list[np.ndarray] = field(default_factory=list)
    stopped: list[np.ndarray] = field(default_factory=list)
    exited_upper: list[np.ndarray] = field(default_factory=list)


class _BarrierTracker:
    """First exits of [1/n, n] per level, observed on the time grid."""

    def __init__(self, levels: tuple[int, ...], m: int) -> None:
        self.levels = levels
        self.exit_times = [np.full(m, np.nan) for _ in levels]
        self.stopped = [np.full(m, np.nan) for _ in levels]
        self.upper = [np.zeros(m, dtype=bool) for _ in levels]

    def observe(self, x: np.ndarray, t: float) -> None:
        for i, n in enumerate(self.levels):
            active = np.isnan(self.exit_times[i])
            if not np.any(active):
                continue
            hit_up = active & (x >= n)
            out = hit_up | (active & (x <= 1.0 / n))
            if np.any(out):
                self.exit_times[i][out] = t
                self.stopped[i][out] = x[out]
                self.upper[i][hit_up] = True

    def finish(self, x: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray], list[np.ndarray]]:
        for i in range(len(self.levels)):
            inside = np.isnan(self.exit_times[i])
            self.stopped[i][inside] = x[inside]
        return self.exit_times, self.stopped, self.upper


def _euler_block(
    model: VolatilityModel,
    x0: float,
    t0: float,
    dt: float,
    n_steps: int,
    levels: tuple[int, ...],
    threshold: float,
    in_range: float,
    stop_above: float | None,
    seed: int,
    block: int,
    m: int,
) -> _BlockResult:
    """Absorbed Euler steps on the live paths of one block.

    A path leaves the live set when it hits zero (absorbed), when ``x`` or
    ``sigma(x)`` leaves the floating range or exceeds ``threshold`` (overflow,
    frozen at its last finite value), or when it reaches ``stop_above``
    (stopped, running max recorded). A non-finite sigma at ``x <= in_range``
    aborts the run. The normals are drawn for every path so the stream layout
    does not depend on how many paths are still live.
    """
    rng = block_generator(seed, block)
    sqrt_dt = math.sqrt(dt)
    x = np.full(m, x0)
    absorbed = np.zeros(m, dtype=bool)
    overflow = np.zeros(m, dtype=bool)
    stopped = np.full(m, stop_above is not None and x0 >= stop_above)
    running_max = x.copy()
    tracker = _BarrierTracker(levels, m)
    tracker.observe(x, t0)

    for k in range(n_steps):
        z = rng.standard_normal(m)
        live = np.flatnonzero(~(absorbed | overflow | stopped))
        if live.size:
            xs = x[live]
            with np.errstate(over="ignore", invalid="ignore"):
                sigma = model(xs)
                # inside the validated probe range a non-finite sigma is a model defect
                defect = ~np.isfinite(sigma) & (xs <= in_range)
                if np.any(defect):
                    bad = xs[defect][0]
                    raise SimulationError(
                        f"sigma is not finite at x={float(bad)!r} (step {k}, block {block}, {model.describe()})"
                    )
                step = xs + sigma * sqrt_dt * z[live]
            blown = ~np.isfinite(sigma) | ~np.isfinite(step) | (step > threshold)
            if stop_above is not None:
                # a blown path is past every level below the threshold
                up = blown | (step >= stop_above)
                running_max[live[up]] = np.where(blown[up], np.inf, step[up])
                stopped[live[up]] = True
                step[up] = np.where(blown[up], stop_above, step[up])
                blown[:] = False
            overflow[live[blown]] = True
            step[blown] = xs[blown]
            hit = step <= 0.0
            step[hit] = 0.0
            absorbed[live[hit]] = True
            x[live] = step
            np.maximum(running_max, x, out=running_max)
        tracker.observe(x, t0 + (k + 1) * dt)

    exit_times, stopped_values, upper = tracker.finish(x)
    return _BlockResult(x, absorbed, running_max, overflow, exit_times, stopped_values, upper)


def _inverse_bessel_block(
    x0: float,
    t0: float,
    dt: float,
    n_steps: int,
    alpha: float,
    levels: tuple[int, ...],
    seed: int,
    block: int,
    m: int,
) -> _BlockResult:
    """X = 1 / (alpha |B|) with B a 3-d Brownian motion started at (1/(alpha x0), 0, 0)."""
    rng = block_generator(seed, block)
    sqrt_dt = math.sqrt(dt)
    b = np.zeros((m, 3))
    b[:, 0] = 1.0 / (alpha * x0)
    x = np.full(m, x0)
    running_max = x.copy()
    tracker = _BarrierTracker(levels, m)
    tracker.observe(x, t0)

    for k in range(n_steps):
        b += sqrt_dt * rng.standard_normal((m, 3))
        x = 1.0 / (alpha * np.sqrt(np.einsum("ij,ij->i", b, b)))
        np.maximum(running_max, x, out=running_max)
        tracker.observe(x, t0 + (k + 1) * dt)

    exit_times, stopped, upper = tracker.finish(x)
    overflow = ~np.isfinite(x)
    x[overflow] = 0.0
    return _BlockResult(x, np.zeros(m, dtype=bool), running_max, overflow, exit_times, stopped, upper)


def _validate(x0: float, t0: float, T: float, n_steps: int, n_paths: int) -> None:
    if not (math.isfinite(x0) and x0 > 0):
        raise ValueError(f"x0 must be positive and finite, got {x0}")
    if not t0 < T:
        raise ValueError(f"t0 must be before T, got t0={t0}, T={T}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be at least 1, got {n_paths}")


def simulate_paths(
    model: VolatilityModel,
    x0: float,
    t0: float,
    T: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    barriers: StoppingSpec | None = None,
    *,
    scheme: Scheme = Scheme.EULER_ABSORBED,
    workers: int = 1,
    block_size: int | None = None,
    stop_above: float | None = None,
    config: MonteCarloConfig | None = None,
) -> PathBatch:
    """Simulate ``n_paths`` paths from (t0, x0) to T on ``n_steps`` equal steps.

    Euler paths whose value or volatility leaves the floating range or exceeds
    the overflow threshold are frozen, dropped from every per-path array and
    counted in ``overflow_count``; more than the allowed fraction aborts with
    SimulationError. With ``stop_above`` set, Euler paths are stopped the first
    time they reach that level, an exploding path included, and keep their
    running max (``inf`` for an explosion) instead of counting as overflow.
    """
    _validate(x0, t0, T, n_steps, n_paths)
    cfg = config or get_config().monte_carlo
    if stop_above is not None and not 0 < stop_above <= cfg.overflow_threshold:
        raise ValueError(f"stop_above must lie in (0, {cfg.overflow_threshold:g}], got {stop_above}")
    size = block_size or cfg.block_size
    levels = barriers.levels if barriers is not None else ()
    in_range = get_config().probe.probe_max
    dt = (T - t0) / n_steps

    if scheme == Scheme.INVERSE_BESSEL_EXACT:
        if not model.has_inverse_bessel_oracle:
            raise SchemeError(f"no exact inverse-Bessel law for {model.describe()}")
        alpha = model.cev_parameters[0]  # type: ignore[index]

        def work(block: int, m: int) -> _BlockResult:
            return _inverse_bessel_block(x0, t0, dt, n_steps, alpha, levels, seed, block, m)

    else:

        def work(block: int, m: int) -> _BlockResult:
            return _euler_block(
                model, x0, t0, dt, n_steps, levels, cfg.overflow_threshold, in_range, stop_above, seed, block, m
            )

    results = run_blocks(work, n_paths, size, workers)

    overflow = np.concatenate([r.overflow for r in results])
    n_overflow = int(np.count_nonzero(overflow))
    if n_overflow > cfg.overflow_max_fraction * n_paths:
        raise SimulationError(
            f"{n_overflow} of {n_paths} paths overflowed {cfg.overflow_threshold:g} ({model.describe()})"
        )
    if n_overflow:
        logger.warning("paths_overflowed", count=n_overflow, n_paths=n_paths, model=model.describe())
    keep = ~overflow

    records = [
        BarrierRecord(
            level=n,
            exit_times=np.concatenate([r.exit_times[i] for r in results])[keep],
            stopped_values=np.concatenate([r.stopped[i] for r in results])[keep],
            exited_upper=np.concatenate([r.exited_upper[i] for r in results])[keep],
        )
        for i, n in enumerate(levels)
    ]
    batch = PathBatch(
        x0=x0,
        t0=t0,
        T=T,
        n_steps=n_steps,
        scheme=scheme,
        terminal_values=np.concatenate([r.terminal for r in results])[keep],
        absorption_flags=np.concatenate([r.absorbed for r in results])[keep],
        running_max=np.concatenate([r.running_max for r in results])[keep],
        barrier_records=records,
        overflow_count=n_overflow,
        rng=RngDescriptor(seed=seed, block_size=size),
    )
    logger.debug(
        "paths_simulated",
        scheme=scheme.value,
        n_paths=batch.n_paths,
        n_steps=n_steps,
        absorbed=int(np.count_nonzero(batch.absorption_flags)),
        seed=seed,
    )
    return batch


def inverse_bessel_exact(
    x0: float,
    t0: float,
    T: float,
    n_paths: int,
    seed: int,
    *,
    alpha: float = 1.0,
    n_steps: int = 1,
    barriers: StoppingSpec | None = None,
    workers: int = 1,
    block_size: int | None = None,
) -> PathBatch:
    """Exact paths of sigma = alpha x^2; ``n_steps=1`` samples the terminal law directly."""
    return simulate_paths(
        VolatilityModel.cev(alpha=alpha, p=2.0),
        x0,
        t0,
        T,
        n_steps,
        n_paths,
        seed,
        barriers,
        scheme=Scheme.INVERSE_BESSEL_EXACT,
        workers=workers,
        block_size=block_size,
    )
