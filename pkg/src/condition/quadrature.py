"""Adaptive Gauss-Kronrod quadrature of positive integrands (QUADPACK via scipy)."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
import structlog
from scipy import integrate

from src.config import QuadratureConfig
from src.errors import QuadratureDomainError

logger = structlog.get_logger(__name__)

# Finite part of an infinite range is integrated decade by decade up to here.
_INFINITE_SPLIT = 1e6


def _guarded(f: Callable[[float], float], label: str) -> Callable[[float], float]:
    def wrapped(u: float) -> float:
        value = float(f(u))
        if not math.isfinite(value):
            raise QuadratureDomainError(f"{label}: integrand is not finite at u={u:g}")
        return value

    return wrapped


def integrate_interval(
    f: Callable[[float], float],
    a: float,
    b: float,
    config: QuadratureConfig | None = None,
    label: str = "integral",
) -> float:
    """Integrate f over [a, b] with relative tolerance ``config.rel_tol``.

    The interval is split at powers of ten so that no single QUADPACK call
    spans more than one decade.
    """
    if b <= a:
        return 0.0
    cfg = config or QuadratureConfig()
    guarded = _guarded(f, label)
    if math.isinf(b):
        split = max(a, _INFINITE_SPLIT)
        head = integrate_interval(f, a, split, cfg, label)
        value, abserr, info, *message = integrate.quad(
            guarded, split, math.inf, epsabs=0.0, epsrel=cfg.rel_tol, limit=cfg.max_subintervals, full_output=1
        )
        if message:
            logger.warning("quad_tail_unreliable", label=label, split=split, abserr=abserr, message=message[0])
            return math.inf
        return head + value
    total = 0.0
    for lo, hi in zip(*_decades(a, b)):
        value, abserr, info, *message = integrate.quad(
            guarded,
            lo,
            hi,
            epsabs=0.0,
            epsrel=cfg.rel_tol,
            limit=cfg.max_subintervals,
            full_output=1,
        )
        if message:
            logger.debug("quad_warning", label=label, lo=lo, hi=hi, abserr=abserr, message=message[0])
        total += value
    return total


def _decades(a: float, b: float) -> tuple[list[float], list[float]]:
    cuts = [a]
    if a > 0:
        k = math.floor(math.log10(a)) + 1
        while 10.0**k < b:
            if 10.0**k > a:
                cuts.append(10.0**k)
            k += 1
    cuts.append(b)
    return cuts[:-1], cuts[1:]


def cumulative_integrals(
    f: Callable[[float], float],
    a: float,
    upper_limits: np.ndarray,
    config: QuadratureConfig | None = None,
    label: str = "integral",
) -> np.ndarray:
    """Return int_a^B f for each B in ascending ``upper_limits`` by accumulating pieces."""
    out = np.empty(len(upper_limits), dtype=float)
    running, prev = 0.0, a
    for i, upper in enumerate(upper_limits):
        running += integrate_interval(f, prev, float(upper), config, label)
        out[i] = running
        prev = max(prev, float(upper))
    return out
