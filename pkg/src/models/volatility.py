"""Volatility functions sigma(x) and their spec-string grammar.

Spec strings::

    cev:alpha=<a>,p=<p>          alpha defaults to 1
    table:<x1>:<s1>,<x2>:<s2>,...
    <expression in x>            see src.models.expression

Every model returns sigma(x) = 0 for x <= 0.
"""

from __future__ import annotations

from enum import Enum
from typing import Any

import numpy as np
import orjson
import structlog
from pydantic import BaseModel, PrivateAttr, model_validator

from src.errors import ModelValidationError, SpecSyntaxError
from src.models.expression import Node, match_power_law, parse_expression
from src.models.probe import ProbeGrid, default_probe

logger = structlog.get_logger(__name__)


class VolatilityKind(str, Enum):
    CEV = "cev"
    EXPRESSION = "expression"
    TABLE = "table"


class VolatilityModel(BaseModel):
    """A volatility function on (0, inf), extended by zero to (-inf, 0].

    TABLE models interpolate linearly in log-log coordinates between nodes and
    continue with the power law of the first/last segment outside the table.
    """

    kind: VolatilityKind
    alpha: float | None = None
    p: float | None = None
    expression: str | None = None
    abscissae: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None

    model_config = {"frozen": True}

    _tree: Node | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_fields(self) -> VolatilityModel:
        if self.kind == VolatilityKind.CEV:
            if self.alpha is None or self.p is None:
                raise ValueError("CEV model needs alpha and p")
            if not self.alpha > 0 or not np.isfinite(self.alpha) or not np.isfinite(self.p):
                raise ValueError(f"CEV needs finite alpha > 0 and finite p, got {self.alpha}, {self.p}")
        elif self.kind == VolatilityKind.EXPRESSION:
            if not self.expression:
                raise ValueError("expression model needs an expression")
        else:
            xs, vs = self.abscissae or (), self.values or ()
            if len(xs) < 2 or len(xs) != len(vs):
                raise ValueError("table needs at least two (x, sigma) pairs")
            if any(x <= 0 for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("table abscissae must be positive and strictly increasing")
            if any(not v > 0 for v in vs):
                raise ValueError("table values must be positive")
        return self

    def model_post_init(self, __context: Any) -> None:
        if self.kind == VolatilityKind.EXPRESSION:
            self._tree = parse_expression(self.expression or "")

    # -- constructors -------------------------------------------------------

    @classmethod
    def cev(cls, alpha: float = 1.0, p: float = 1.0) -> VolatilityModel:
        return cls(kind=VolatilityKind.CEV, alpha=alpha, p=p)

    @classmethod
    def from_expression(cls, source: str) -> VolatilityModel:
        return cls(kind=VolatilityKind.EXPRESSION, expression=source)

    @classmethod
    def table(cls, abscissae: list[float], values: list[float]) -> VolatilityModel:
        return cls(kind=VolatilityKind.TABLE, abscissae=tuple(abscissae), values=tuple(values))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x: Any) -> Any:
        arr = np.asarray(x, dtype=float)
        out = np.zeros(arr.shape, dtype=float)
        positive = arr > 0
        if np.any(positive):
            with np.errstate(all="ignore"):
                out[positive] = self._positive(arr[positive])
        if arr.ndim == 0:
            return float(out)
        return out

    def _positive(self, x: np.ndarray) -> np.ndarray:
        if self.kind == VolatilityKind.CEV:
            return self.alpha * x**self.p
        if self.kind == VolatilityKind.EXPRESSION:
            assert self._tree is not None
            return self._tree.evaluate(x)
        log_x = np.log(np.asarray(self.abscissae))
        log_s = np.log(np.asarray(self.values))
        lx = np.log(x)
        inside = np.interp(lx, log_x, log_s)
        lo_slope = (log_s[1] - log_s[0]) / (log_x[1] - log_x[0])
        hi_slope = (log_s[-1] - log_s[-2]) / (log_x[-1] - log_x[-2])
        below = log_s[0] + lo_slope * (lx - log_x[0])
        above = log_s[-1] + hi_slope * (lx - log_x[-1])
        return np.exp(np.where(lx < log_x[0], below, np.where(lx > log_x[-1], above, inside)))

    # -- structure ----------------------------------------------------------

    @property
    def cev_parameters(self) -> tuple[float, float] | None:
        if self.kind == VolatilityKind.CEV:
            return float(self.alpha), float(self.p)  # type: ignore[arg-type]
        return None

    @property
    def has_inverse_bessel_oracle(self) -> bool:
        """sigma(x) = alpha * x^2 has an exact simulation via a 3-d Bessel process."""
        return self.kind == VolatilityKind.CEV and self.p == 2.0

    def to_spec(self) -> str:
        if self.kind == VolatilityKind.CEV:
            return f"cev:alpha={self.alpha!r},p={self.p!r}"
        if self.kind == VolatilityKind.EXPRESSION:
            assert self._tree is not None
            return self._tree.to_text()
        pairs = ",".join(f"{a!r}:{v!r}" for a, v in zip(self.abscissae or (), self.values or ()))
        return f"table:{pairs}"

    def describe(self) -> str:
        if self.kind == VolatilityKind.CEV:
            return f"CEV(alpha={self.alpha:g}, p={self.p:g})"
        if self.kind == VolatilityKind.EXPRESSION:
            return f"sigma(x) = {self.expression}"
        return f"table with {len(self.abscissae or ())} nodes"

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _parse_pairs(spec: str, body: str, offset: int, sep: str) -> list[tuple[str, str, int]]:
    """Split ``k<sep>v,k<sep>v`` returning (key, value, column) triples."""
    out: list[tuple[str, str, int]] = []
    col = offset
    for chunk in body.split(","):
        if sep not in chunk:
            raise SpecSyntaxError(spec, f"expected 'key{sep}value'", (col, col + len(chunk)))
        key, value = chunk.split(sep, 1)
        out.append((key.strip(), value.strip(), col))
        col += len(chunk) + 1
    return out


def _to_float(spec: str, text: str, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise SpecSyntaxError(spec, f"not a number: {text!r}", (col, col + max(1, len(text)))) from None


def _parse_cev(spec: str, body: str, offset: int) -> VolatilityModel:
    params = {"alpha": 1.0}
    for key, value, col in _parse_pairs(spec, body, offset, "="):
        if key not in ("alpha", "p"):
            raise SpecSyntaxError(spec, f"unknown CEV parameter {key!r}", (col, col + len(key)))
        params[key] = _to_float(spec, value, col + len(key) + 1)
    if "p" not in params:
        raise SpecSyntaxError(spec, "CEV spec needs p=<exponent>", (offset, len(spec)))
    if params["alpha"] <= 0:
        raise ModelValidationError(f"CEV alpha must be positive, got {params['alpha']}")
    return VolatilityModel.cev(alpha=params["alpha"], p=params["p"])


def _parse_table(spec: str, body: str, offset: int) -> VolatilityModel:
    xs: list[float] = []
    vs: list[float] = []
    for key, value, col in _parse_pairs(spec, body, offset, ":"):
        xs.append(_to_float(spec, key, col))
        vs.append(_to_float(spec, value, col + len(key) + 1))
    try:
        return VolatilityModel.table(xs, vs)
    except ValueError as exc:
        raise ModelValidationError(str(exc)) from exc


def check_positive(model: VolatilityModel, probe: ProbeGrid | None = None) -> None:
    """Raise if sigma is non-finite or <= 0 anywhere on the probe grid."""
    xs = (probe or default_probe()).points()
    values = model(xs)
    bad = ~np.isfinite(values)
    if np.any(bad):
        x_bad = float(xs[np.argmax(bad)])
        raise ModelValidationError(f"sigma is not finite at x={x_bad:g} ({model.describe()})")
    nonpositive = values <= 0
    if np.any(nonpositive):
        idx = int(np.argmax(nonpositive))
        raise ModelValidationError(
            f"sigma <= 0 on (0, inf): sigma({xs[idx]:g}) = {values[idx]:g} ({model.describe()})"
        )


def parse_volatility(
    spec: str,
    probe: ProbeGrid | None = None,
    recognize: bool = True,
    validate: bool = True,
) -> VolatilityModel:
    """Parse a volatility spec string.

    Expressions that are structurally ``alpha * x^p`` become CEV models when
    ``recognize`` is set, which lets the condition classifier decide
    symbolically. ``validate`` enforces sigma > 0 on the probe grid.
    """
    text = spec.strip()
    lead = len(spec) - len(spec.lstrip())
    if text.startswith("cev:"):
        model = _parse_cev(spec, text[4:], lead + 4)
    elif text.startswith("table:"):
        model = _parse_table(spec, text[6:], lead + 6)
    else:
        tree = parse_expression(spec)
        power_law = match_power_law(tree) if recognize else None
        if power_law is not None:
            model = VolatilityModel.cev(alpha=power_law[0], p=power_law[1])
            logger.debug("cev_recognized", spec=spec, alpha=power_law[0], p=power_law[1])
        else:
            model = VolatilityModel.from_expression(text)
    if validate:
        check_positive(model, probe)
    return model
