"""Report types for the martingale condition and the Lyapunov function Psi."""

from __future__ import annotations

from enum import Enum

import orjson
from pydantic import BaseModel, Field


class Verdict(str, Enum):
    MARTINGALE = "martingale"
    STRICT_LOCAL_MARTINGALE = "strict_local_martingale"
    INCONCLUSIVE = "inconclusive"


class ClassificationMethod(str, Enum):
    SYMBOLIC_CEV = "symbolic_cev"
    NUMERIC_TAIL_FIT = "numeric_tail_fit"


class PsiTrend(str, Enum):
    DIVERGING = "diverging"
    PLATEAUING = "plateauing"


class PartialIntegral(BaseModel):
    upper: float = Field(description="upper limit B")
    value: float = Field(description="int_1^B x / sigma^2(x) dx")


class ConditionReport(BaseModel):
    """Verdict on int_1^inf x / sigma^2(x) dx = inf, with the evidence behind it."""

    model: str
    verdict: Verdict
    method: ClassificationMethod
    partial_integrals: list[PartialIntegral]
    tail_exponent: float | None = Field(default=None, description="beta in x/sigma^2 ~ c x^-beta")
    tail_exponent_band: tuple[float, float] | None = None
    tail_drift: float | None = Field(default=None, description="|beta(first half) - beta(second half)|")
    limit_value: float | None = None
    epsilon_margin: float
    notes: str = ""

    model_config = {"frozen": True}

    @property
    def is_martingale(self) -> bool:
        return self.verdict == Verdict.MARTINGALE

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()

    def csv_rows(self) -> tuple[list[str], list[list[float]]]:
        return ["B", "partial_integral"], [[item.upper, item.value] for item in self.partial_integrals]


class PsiPoint(BaseModel):
    x: float
    psi: float
    ratio: float


class PsiProfile(BaseModel):
    """Psi(x)/x along a grid in [1, inf) and the trend read off it."""

    model: str
    points: list[PsiPoint]
    monotone_ok: bool
    trend: PsiTrend
    increment_slope: float | None = None
    limit_estimate: float | None = None
    notes: str = ""

    model_config = {"frozen": True}

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()

    def csv_rows(self) -> tuple[list[str], list[list[float]]]:
        return ["x", "psi_over_x"], [[pt.x, pt.ratio] for pt in self.points]
