from .estimators import (
    estimate_minimal_price,
    estimate_payoff_expectation,
    extrapolate_ladder,
    martingale_defect,
    psi_bound_check,
    put_call_parity_gap,
)
from .models import MCEstimate, MonteCarloParams, PathBatch, PsiBoundReport, Scheme, StoppingSpec
from .simulator import inverse_bessel_exact, simulate_paths

__all__ = [
    "MCEstimate",
    "MonteCarloParams",
    "PathBatch",
    "PsiBoundReport",
    "Scheme",
    "StoppingSpec",
    "estimate_minimal_price",
    "estimate_payoff_expectation",
    "extrapolate_ladder",
    "inverse_bessel_exact",
    "martingale_defect",
    "psi_bound_check",
    "put_call_parity_gap",
    "simulate_paths",
]
