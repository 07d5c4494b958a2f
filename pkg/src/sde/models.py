"""Data types for path simulation and Monte Carlo estimates."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.config import MonteCarloConfig

Z_95 = 1.96


class Scheme(str, Enum):
    EULER_ABSORBED = "euler_absorbed"
    INVERSE_BESSEL_EXACT = "inverse_bessel_exact"


class RngDescriptor(BaseModel):
    """Seed and stream layout: block b of ``block_size`` paths draws from
    Philox keyed by ``seed`` with its counter starting at b * 2**128."""

    seed: int = Field(ge=0, lt=2**128)
    block_size: int = Field(ge=1)
    generator: str = "philox"
    layout: str = "block-counter"

    model_config = {"frozen": True}


class StoppingSpec(BaseModel):
    """Levels n defining tau_n = first exit of [1/n, n], capped at T."""

    levels: tuple[int, ...]

    model_config = {"frozen": True}

    @field_validator("levels")
    @classmethod
    def _sorted_positive(cls, levels: tuple[int, ...]) -> tuple[int, ...]:
        if not levels:
            raise ValueError("at least one stopping level is required")
        if any(n < 1 for n in levels):
            raise ValueError(f"stopping levels must be positive integers, got {levels}")
        return tuple(sorted(set(levels)))


class MonteCarloParams(BaseModel):
    """Path count, time stepping, seed and parallel layout of one estimate."""

    n_paths: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**128)
    n_steps: int | None = Field(default=None, ge=1)
    steps_per_unit_time: int = Field(default=2000, ge=1)
    workers: int = Field(default=1, ge=1)
    block_size: int = Field(default=8192, ge=1)

    model_config = {"frozen": True}

    @classmethod
    def from_config(cls, seed: int, config: MonteCarloConfig | None = None, **overrides: Any) -> MonteCarloParams:
        cfg = config or MonteCarloConfig()
        values: dict[str, Any] = {
            "n_paths": cfg.paths,
            "seed": seed,
            "steps_per_unit_time": cfg.steps_per_unit_time,
            "workers": cfg.workers,
            "block_size": cfg.block_size,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def steps_for(self, horizon: float) -> int:
        if self.n_steps is not None:
            return self.n_steps
        return max(1, math.ceil(self.steps_per_unit_time * horizon))


class BarrierRecord(BaseModel):
    """First exit of [1/level, level] per path; NaN exit time when the path stayed inside."""

    level: int
    exit_times: np.ndarray
    stopped_values: np.ndarray
    exited_upper: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class PathBatch(BaseModel):
    x0: float
    t0: float
    T: float
    n_steps: int
    scheme: Scheme
    terminal_values: np.ndarray
    absorption_flags: np.ndarray
    running_max: np.ndarray
    barrier_records: list[BarrierRecord] = Field(default_factory=list)
    overflow_count: int = 0
    rng: RngDescriptor

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def n_paths(self) -> int:
        return int(self.terminal_values.size)

    def barrier(self, level: int) -> BarrierRecord:
        for record in self.barrier_records:
            if record.level == level:
                return record
        raise KeyError(f"no barrier record for level {level}")

    def to_dict(self, include_values: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "x0": self.x0,
            "t0": self.t0,
            "T": self.T,
            "n_steps": self.n_steps,
            "n_paths": self.n_paths,
            "scheme": self.scheme.value,
            "absorbed": int(np.count_nonzero(self.absorption_flags)),
            "overflow_count": self.overflow_count,
            "rng": self.rng.model_dump(),
        }
        if include_values:
            out["terminal_values"] = self.terminal_values
            out["barriers"] = [
                {
                    "level": rec.level,
                    "exited": int(np.count_nonzero(~np.isnan(rec.exit_times))),
                    "exited_upper": int(np.count_nonzero(rec.exited_upper)),
                }
                for rec in self.barrier_records
            ]
        return out

    def to_json(self, include_values: bool = True) -> str:
        return orjson.dumps(self.to_dict(include_values), option=orjson.OPT_SERIALIZE_NUMPY).decode()


class MCEstimate(BaseModel):
    mean: float
    stderr: float = Field(ge=0.0)
    n_paths: int = Field(ge=0)
    ci95: tuple[float, float]
    scheme: Scheme | None = None
    seed: int | None = None
    n_steps: int | None = None
    label: str = ""
    metadata: dict[str, Any] = Field(default_factory=dict)

    model_config = {"frozen": True}

    @classmethod
    def from_samples(cls, samples: np.ndarray, **fields: Any) -> MCEstimate:
        n = int(samples.size)
        mean = float(np.mean(samples)) if n else math.nan
        stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls.exact(mean, n_paths=n, stderr=stderr, **fields)

    @classmethod
    def exact(cls, value: float, n_paths: int = 0, stderr: float = 0.0, **fields: Any) -> MCEstimate:
        return cls(
            mean=value,
            stderr=stderr,
            n_paths=n_paths,
            ci95=(value - Z_95 * stderr, value + Z_95 * stderr),
            **fields,
        )

    def contains(self, value: float, n_stderr: float = 3.0) -> bool:
        return abs(self.mean - value) <= n_stderr * self.stderr

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()


class PsiBoundEntry(BaseModel):
    level: int
    estimate: MCEstimate
    exited_upper_fraction: float = Field(ge=0.0, le=1.0)
    passed: bool

    model_config = {"frozen": True}


class PsiBoundReport(BaseModel):
    """E[Psi(X_tau_n)] against Psi(x) + x (T - t) / 2 for each stopping level."""

    model: str
    x: float
    t: float
    T: float
    psi_x: float
    bound: float
    scheme: Scheme | None
    entries: list[PsiBoundEntry]

    model_config = {"frozen": True}

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json(self) -> str:
        data = self.model_dump(mode="json")
        data["all_passed"] = self.all_passed
        return orjson.dumps(data).decode()
