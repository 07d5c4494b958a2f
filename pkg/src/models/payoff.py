"""Terminal payoffs g and their growth classification.

Spec strings: ``identity``, ``call:K=<k>``, ``put:K=<k>``, ``const:<c>`` or an
expression in x (see src.models.expression).
"""

from __future__ import annotations

from enum import Enum
from typing import Any

import numpy as np
import orjson
import structlog
from pydantic import BaseModel, Field, PrivateAttr, model_validator

from src.errors import ModelValidationError, SpecSyntaxError
from src.models.expression import Node, parse_expression
from src.models.probe import ProbeGrid, default_probe, growth_probe

logger = structlog.get_logger(__name__)

# Fitted log-log slope of g(x)/x within this band counts as a bounded ratio.
GROWTH_SLOPE_BAND = 0.05


class PayoffKind(str, Enum):
    IDENTITY = "identity"
    CALL = "call"
    PUT = "put"
    CONSTANT = "constant"
    EXPRESSION = "expression"


class GrowthKind(str, Enum):
    AT_MOST_LINEAR = "at_most_linear"
    STRICTLY_SUBLINEAR = "strictly_sublinear"
    SUPERLINEAR = "superlinear"


class GrowthClassification(BaseModel):
    """Growth tag plus the tail data it was decided from."""

    kind: GrowthKind
    constant: float | None = Field(default=None, description="C in g(x) <= C(1+x)")
    tail_exponent: float | None = Field(default=None, description="fitted slope of log(g/x) vs log x")
    tail_x: list[float] = Field(default_factory=list)
    tail_ratio: list[float] = Field(default_factory=list)

    model_config = {"frozen": True}


class PayoffSpec(BaseModel):
    """Terminal data g >= 0 on [0, inf)."""

    kind: PayoffKind
    strike: float | None = Field(default=None, gt=0.0)
    constant: float | None = Field(default=None, ge=0.0)
    expression: str | None = None
    growth: GrowthClassification | None = None

    model_config = {"frozen": True}

    _tree: Node | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_fields(self) -> PayoffSpec:
        if self.kind in (PayoffKind.CALL, PayoffKind.PUT) and self.strike is None:
            raise ValueError(f"{self.kind.value} payoff needs a strike")
        if self.kind == PayoffKind.CONSTANT and self.constant is None:
            raise ValueError("constant payoff needs a value")
        if self.kind == PayoffKind.EXPRESSION and not self.expression:
            raise ValueError("expression payoff needs an expression")
        return self

    def model_post_init(self, __context: Any) -> None:
        if self.kind == PayoffKind.EXPRESSION:
            self._tree = parse_expression(self.expression or "")

    @classmethod
    def identity(cls) -> PayoffSpec:
        return cls(kind=PayoffKind.IDENTITY)

    @classmethod
    def call(cls, strike: float) -> PayoffSpec:
        return cls(kind=PayoffKind.CALL, strike=strike)

    @classmethod
    def put(cls, strike: float) -> PayoffSpec:
        return cls(kind=PayoffKind.PUT, strike=strike)

    @classmethod
    def const(cls, value: float) -> PayoffSpec:
        return cls(kind=PayoffKind.CONSTANT, constant=value)

    @classmethod
    def from_expression(cls, source: str) -> PayoffSpec:
        return cls(kind=PayoffKind.EXPRESSION, expression=source)

    def __call__(self, x: Any) -> Any:
        arr = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = self._evaluate(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        if self.kind == PayoffKind.IDENTITY:
            return x.copy()
        if self.kind == PayoffKind.CALL:
            return np.maximum(x - self.strike, 0.0)
        if self.kind == PayoffKind.PUT:
            return np.maximum(self.strike - x, 0.0)
        if self.kind == PayoffKind.CONSTANT:
            return np.full(x.shape, self.constant, dtype=float)
        assert self._tree is not None
        return np.asarray(self._tree.evaluate(x), dtype=float)

    def with_growth(self, growth: GrowthClassification) -> PayoffSpec:
        return self.model_copy(update={"growth": growth})

    def to_spec(self) -> str:
        if self.kind == PayoffKind.IDENTITY:
            return "identity"
        if self.kind == PayoffKind.CALL:
            return f"call:K={self.strike!r}"
        if self.kind == PayoffKind.PUT:
            return f"put:K={self.strike!r}"
        if self.kind == PayoffKind.CONSTANT:
            return f"const:{self.constant!r}"
        assert self._tree is not None
        return self._tree.to_text()

    def describe(self) -> str:
        if self.kind in (PayoffKind.CALL, PayoffKind.PUT):
            return f"{self.kind.value}(K={self.strike:g})"
        if self.kind == PayoffKind.CONSTANT:
            return f"const({self.constant:g})"
        if self.kind == PayoffKind.EXPRESSION:
            return f"g(x) = {self.expression}"
        return "identity"

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()


def classify_growth(payoff: PayoffSpec, probe: ProbeGrid | None = None) -> GrowthClassification:
    """Classify g by the trend of g(x)/x on the upper half of a geometric probe.

    Decaying ratio -> StrictlySublinear; slope within +-0.05 -> AtMostLinear with
    C = max g(x)/(1+x) over the probe (x = 0 included); growing -> Superlinear.
    """
    xs = (probe or growth_probe()).points()
    g = payoff(xs)
    tail = slice(len(xs) // 2, None)
    tail_x, tail_ratio = xs[tail], g[tail] / xs[tail]

    positive = tail_ratio > 0
    slope: float | None = None
    if np.count_nonzero(positive) >= 2:
        slope = float(np.polyfit(np.log(tail_x[positive]), np.log(tail_ratio[positive]), 1)[0])

    if slope is None or slope < -GROWTH_SLOPE_BAND:
        kind = GrowthKind.STRICTLY_SUBLINEAR
    elif slope <= GROWTH_SLOPE_BAND:
        kind = GrowthKind.AT_MOST_LINEAR
    else:
        kind = GrowthKind.SUPERLINEAR

    constant = None
    if kind == GrowthKind.AT_MOST_LINEAR:
        all_x = np.concatenate(([0.0], xs))
        constant = float(np.max(payoff(all_x) / (1.0 + all_x)))

    return GrowthClassification(
        kind=kind,
        constant=constant,
        tail_exponent=slope,
        tail_x=tail_x.tolist(),
        tail_ratio=tail_ratio.tolist(),
    )


def _strike(spec: str, body: str, offset: int) -> float:
    key, sep, value = body.partition("=")
    if not sep or key.strip() != "K":
        raise SpecSyntaxError(spec, "expected 'K=<strike>'", (offset, len(spec)))
    try:
        strike = float(value)
    except ValueError:
        raise SpecSyntaxError(spec, f"not a number: {value.strip()!r}", (offset + 2, len(spec))) from None
    if not strike > 0:
        raise ModelValidationError(f"strike must be positive, got {strike}")
    return strike


def _constant(spec: str, body: str, offset: int) -> float:
    text = body.split("=", 1)[1] if body.startswith("c=") else body
    try:
        value = float(text)
    except ValueError:
        raise SpecSyntaxError(spec, f"not a number: {text.strip()!r}", (offset, len(spec))) from None
    if value < 0 or not np.isfinite(value):
        raise ModelValidationError(f"constant payoff must be finite and >= 0, got {value}")
    return value


def check_nonnegative(payoff: PayoffSpec, probe: ProbeGrid | None = None) -> None:
    xs = np.concatenate(([0.0], (probe or default_probe()).points()))
    g = payoff(xs)
    if np.any(~np.isfinite(g)):
        x_bad = float(xs[np.argmax(~np.isfinite(g))])
        raise ModelValidationError(f"payoff is not finite at x={x_bad:g} ({payoff.describe()})")
    if np.any(g < 0):
        idx = int(np.argmax(g < 0))
        raise ModelValidationError(f"payoff is negative: g({xs[idx]:g}) = {g[idx]:g} ({payoff.describe()})")


def parse_payoff(spec: str, probe: ProbeGrid | None = None) -> PayoffSpec:
    """Parse a payoff spec, check g >= 0 on the probe grid and attach its growth class."""
    text = spec.strip()
    lead = len(spec) - len(spec.lstrip())
    if text == "identity":
        payoff = PayoffSpec.identity()
    elif text.startswith("call:"):
        payoff = PayoffSpec.call(_strike(spec, text[5:], lead + 5))
    elif text.startswith("put:"):
        payoff = PayoffSpec.put(_strike(spec, text[4:], lead + 4))
    elif text.startswith("const:"):
        payoff = PayoffSpec.const(_constant(spec, text[6:], lead + 6))
    else:
        parse_expression(spec)
        payoff = PayoffSpec.from_expression(text)

    check_nonnegative(payoff, probe)
    growth = classify_growth(payoff)
    if growth.kind == GrowthKind.SUPERLINEAR:
        logger.warning("superlinear_payoff", payoff=payoff.describe(), tail_exponent=growth.tail_exponent)
    return payoff.with_growth(growth)
