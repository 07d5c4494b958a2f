from .probe import ProbeGrid
from .volatility import VolatilityKind, VolatilityModel, parse_volatility
from .payoff import (
    GrowthClassification,
    GrowthKind,
    PayoffKind,
    PayoffSpec,
    classify_growth,
    parse_payoff,
)
from .assumptions import AssumptionReport, validate_assumptions

__all__ = [
    "ProbeGrid",
    "VolatilityKind",
    "VolatilityModel",
    "parse_volatility",
    "GrowthClassification",
    "GrowthKind",
    "PayoffKind",
    "PayoffSpec",
    "classify_growth",
    "parse_payoff",
    "AssumptionReport",
    "validate_assumptions",
]
