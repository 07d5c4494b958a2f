"""Scenario files: INI sections read into a typed ScenarioConfig.

    [scenario]
    sigma = cev:p=2
    payoff = identity
    x = 1
    t = 0
    T = 1

    [mc]
    paths = 100000
    steps = 2000          ; steps per unit time
    seed = 7
    ladder = 4,8,16,32
    workers = 1

    [pde]
    x_max = 16
    n_x = 800
    n_t = 800
    theta = 0.5
    bc = dirichlet-payoff
    spacing = uniform
    ladder = 8,16,32
    reference_xs = 1

    [output]
    directory = out
    formats = csv,json

Precedence: command flags > scenario file > settings defaults.
"""

from __future__ import annotations

import configparser
import io
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, field_validator

from src.config import AppConfig, get_config


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class MonteCarloBlock(BaseModel):
    paths: int = Field(ge=1)
    steps: int = Field(ge=1, description="time steps per unit time")
    seed: int | None = Field(default=None, ge=0)
    ladder: list[int] = Field(default_factory=lambda: [4, 8, 16, 32])
    workers: int = Field(default=1, ge=1)

    model_config = {"frozen": True, "extra": "forbid"}

    @field_validator("ladder", mode="before")
    @classmethod
    def _split_ladder(cls, value: Any) -> Any:
        return _split_list(value)


class PDEBlock(BaseModel):
    x_max: float = Field(gt=0.0)
    n_x: int = Field(ge=4)
    n_t: int = Field(ge=1)
    theta: float = Field(ge=0.5, le=1.0)
    bc: str = "dirichlet-payoff"
    spacing: str = "uniform"
    ladder: list[float] = Field(default_factory=lambda: [8.0, 16.0, 32.0])
    reference_xs: list[float] = Field(default_factory=lambda: [1.0])

    model_config = {"frozen": True, "extra": "forbid"}

    @field_validator("ladder", "reference_xs", mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        return _split_list(value)


class OutputBlock(BaseModel):
    directory: str = "out"
    formats: list[str] = Field(default_factory=lambda: ["csv", "json"])

    model_config = {"frozen": True, "extra": "forbid"}

    @field_validator("formats", mode="before")
    @classmethod
    def _split_formats(cls, value: Any) -> Any:
        return _split_list(value)


class ScenarioConfig(BaseModel):
    sigma: str = "x"
    payoff: str = "identity"
    x: float = Field(default=1.0, gt=0.0)
    t: float = 0.0
    T: float = 1.0
    mc: MonteCarloBlock
    pde: PDEBlock
    output: OutputBlock = Field(default_factory=OutputBlock)

    model_config = {"frozen": True, "extra": "forbid"}

    @classmethod
    def defaults(cls, config: AppConfig | None = None) -> ScenarioConfig:
        app = config or get_config()
        return cls(
            mc=MonteCarloBlock(
                paths=app.monte_carlo.paths,
                steps=app.monte_carlo.steps_per_unit_time,
                workers=app.monte_carlo.workers,
            ),
            pde=PDEBlock(
                x_max=app.pde.x_max,
                n_x=app.pde.n_x,
                n_t=app.pde.n_t,
                theta=app.pde.theta,
                spacing=app.pde.spacing,
            ),
        )

    def with_overrides(self, **overrides: Any) -> ScenarioConfig:
        """Apply flag values; keys are ``field`` or ``block.field``, None means unset."""
        data = self.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            block, _, name = key.rpartition(".")
            target = data[block] if block else data
            target[name] = value
        return ScenarioConfig.model_validate(data)

    def to_ini(self) -> str:
        parser = _parser()
        data = self.model_dump()
        parser["scenario"] = {k: _ini_value(data[k]) for k in ("sigma", "payoff", "x", "t", "T")}
        for section in ("mc", "pde", "output"):
            parser[section] = {k: _ini_value(v) for k, v in data[section].items() if v is not None}
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()


def _ini_value(value: Any) -> str:
    if isinstance(value, list):
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    return parser


def parse_scenario(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Read INI text over ``base`` (settings defaults when omitted)."""
    parser = _parser()
    parser.read_string(text)
    overrides: dict[str, Any] = {}
    if parser.has_section("scenario"):
        overrides.update(parser["scenario"])
    for section in ("mc", "pde", "output"):
        if parser.has_section(section):
            overrides.update({f"{section}.{k}": v for k, v in parser[section].items()})
    unknown = [s for s in parser.sections() if s not in {"scenario", "mc", "pde", "output"}]
    if unknown:
        raise ValueError(f"unknown scenario section(s): {', '.join(unknown)}")
    return (base or ScenarioConfig.defaults()).with_overrides(**overrides)


def load_scenario(path: Path | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig.defaults()
    return parse_scenario(path.read_text(encoding="utf-8"))
