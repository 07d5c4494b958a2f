"""Grid, boundary-condition, solution and gap-report types for the Cauchy problem."""

from __future__ import annotations

from enum import Enum
from typing import Any, Callable

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from scipy.interpolate import RegularGridInterpolator

from src.errors import GridMismatchError

BoundaryProfile = Callable[[float, np.ndarray], np.ndarray]


class Spacing(str, Enum):
    UNIFORM = "uniform"
    LOG_UNIFORM = "log_uniform"


class BCKind(str, Enum):
    DIRICHLET_PAYOFF = "dirichlet_payoff"
    ZERO_GAMMA = "zero_gamma"
    DIRICHLET_PROFILE = "dirichlet_profile"


class GridConfig(BaseModel):
    x_max: float = Field(default=16.0, gt=0.0)
    n_x: int = Field(default=800, ge=4)
    n_t: int = Field(default=800, ge=1)
    T: float = Field(default=1.0, gt=0.0)
    t0: float = 0.0
    spacing: Spacing = Spacing.UNIFORM

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_horizon(self) -> GridConfig:
        if not self.t0 < self.T:
            raise ValueError(f"t0 must be before T, got t0={self.t0}, T={self.T}")
        return self


class Grid(BaseModel):
    x_nodes: np.ndarray
    t_nodes: np.ndarray
    spacing: Spacing

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check_nodes(self) -> Grid:
        x, t = self.x_nodes, self.t_nodes
        if x.ndim != 1 or x.size < 5:
            raise ValueError("x grid needs at least 3 interior nodes")
        if x[0] != 0.0:
            raise ValueError(f"x grid must start at 0, got {x[0]}")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x nodes must be strictly increasing")
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise ValueError("t nodes must be strictly increasing with at least 2 nodes")
        return self

    @property
    def x_max(self) -> float:
        return float(self.x_nodes[-1])

    @property
    def T(self) -> float:
        return float(self.t_nodes[-1])

    @property
    def t0(self) -> float:
        return float(self.t_nodes[0])

    @property
    def n_x(self) -> int:
        return int(self.x_nodes.size - 1)

    @property
    def n_t(self) -> int:
        return int(self.t_nodes.size - 1)

    def matches(self, other: Grid) -> bool:
        return np.array_equal(self.x_nodes, other.x_nodes) and np.array_equal(self.t_nodes, other.t_nodes)

    def require_match(self, other: Grid) -> None:
        if not self.matches(other):
            raise GridMismatchError(
                f"grids differ: ({self.n_x}x{self.n_t}, x_max={self.x_max:g}) vs "
                f"({other.n_x}x{other.n_t}, x_max={other.x_max:g})"
            )

    def describe(self) -> dict[str, Any]:
        return {
            "x_max": self.x_max,
            "n_x": self.n_x,
            "t0": self.t0,
            "T": self.T,
            "n_t": self.n_t,
            "spacing": self.spacing.value,
        }


class FarFieldBC(BaseModel):
    """Condition imposed at x_max in place of the growth class of the full problem."""

    kind: BCKind
    label: str = ""
    profile: BoundaryProfile | None = Field(default=None, exclude=True)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check_profile(self) -> FarFieldBC:
        if (self.kind == BCKind.DIRICHLET_PROFILE) != (self.profile is not None):
            raise ValueError("a boundary profile is required for, and only for, dirichlet_profile")
        return self

    @classmethod
    def dirichlet_payoff(cls) -> FarFieldBC:
        return cls(kind=BCKind.DIRICHLET_PAYOFF, label="dirichlet-payoff")

    @classmethod
    def zero_gamma(cls) -> FarFieldBC:
        return cls(kind=BCKind.ZERO_GAMMA, label="zero-gamma")

    @classmethod
    def dirichlet_profile(cls, profile: BoundaryProfile, label: str = "profile") -> FarFieldBC:
        return cls(kind=BCKind.DIRICHLET_PROFILE, profile=profile, label=label)

    def name(self) -> str:
        return self.label or self.kind.value


class PDESolution(BaseModel):
    """u on x_nodes x t_nodes; ``values[i, j]`` is u(x_i, t_j)."""

    grid: Grid
    values: np.ndarray
    bc: FarFieldBC
    theta: float = Field(ge=0.5, le=1.0)
    metadata: dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    _interp: RegularGridInterpolator | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_shape(self) -> PDESolution:
        expected = (self.grid.x_nodes.size, self.grid.t_nodes.size)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} does not match grid {expected}")
        return self

    def value_at(self, x: float | np.ndarray, t: float | np.ndarray | None = None) -> np.ndarray | float:
        """Bilinear interpolation; exact on nodes. ``t`` defaults to the initial time."""
        if self._interp is None:
            self._interp = RegularGridInterpolator((self.grid.x_nodes, self.grid.t_nodes), self.values)
        xs = np.asarray(x, dtype=float)
        ts = np.full(xs.shape, self.grid.t0) if t is None else np.broadcast_to(np.asarray(t, dtype=float), xs.shape)
        out = self._interp(np.stack([xs.ravel(), ts.ravel()], axis=-1)).reshape(xs.shape)
        return float(out) if xs.ndim == 0 else out

    def initial_slice(self) -> np.ndarray:
        return self.values[:, 0].copy()

    def csv_rows(self) -> tuple[list[str], list[list[float]]]:
        xx, tt = np.meshgrid(self.grid.x_nodes, self.grid.t_nodes, indexing="ij")
        rows = np.column_stack([xx.ravel(), tt.ravel(), self.values.ravel()]).tolist()
        return ["x", "t", "u"], rows

    def metadata_dict(self) -> dict[str, Any]:
        return {"grid": self.grid.describe(), "bc": self.bc.name(), "theta": self.theta, **self.metadata}

    def to_json(self) -> str:
        return orjson.dumps(self.metadata_dict()).decode()


class DefectMethod(str, Enum):
    ZERO = "zero"
    CLOSED_FORM = "closed_form"
    MINIMAL_PRICE_LADDER = "minimal_price_ladder"


class DefectProfile(BaseModel):
    """u*(x, t) = x - E[X_T] sampled on a grid."""

    grid: Grid
    values: np.ndarray
    method: DefectMethod
    verdict: str
    warning: str | None = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class GapVerdict(str, Enum):
    VANISHING_GAP = "vanishing_gap"
    PERSISTENT_GAP = "persistent_gap"
    UNDETERMINED = "undetermined"


class GapRung(BaseModel):
    x_max: float
    n_x: int
    reference_xs: list[float]
    u_a: list[float]
    u_b: list[float]
    gaps: list[float]

    model_config = {"frozen": True}

    @property
    def max_gap(self) -> float:
        return max(self.gaps)


class GapReport(BaseModel):
    model: str
    payoff: str
    payoff_growth: str | None = None
    bc_a: str
    bc_b: str
    theta: float
    rungs: list[GapRung]
    verdict: GapVerdict
    level: float | None = Field(default=None, description="persistent gap level")
    notes: str = ""

    model_config = {"frozen": True}

    @property
    def gaps(self) -> list[float]:
        return [rung.max_gap for rung in self.rungs]

    def to_json(self) -> str:
        return orjson.dumps(self.model_dump(mode="json")).decode()

    def csv_rows(self) -> tuple[list[str], list[list[float]]]:
        rows = [[rung.x_max, x, gap] for rung in self.rungs for x, gap in zip(rung.reference_xs, rung.gaps)]
        return ["x_max", "x", "gap"], rows
