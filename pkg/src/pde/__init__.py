from .models import (
    BCKind,
    DefectProfile,
    FarFieldBC,
    GapReport,
    GapVerdict,
    Grid,
    GridConfig,
    PDESolution,
    Spacing,
)
from .grid import build_grid, grid_config_from_settings
from .solver import solve_cauchy
from .residual import pde_residual
from .boundary import bc_from_name, minimal_profile, monte_carlo_profile
from .defect import add_defect_solution, defect_profile
from .gap import classify_gaps, uniqueness_gap_study

__all__ = [
    "BCKind",
    "DefectProfile",
    "FarFieldBC",
    "GapReport",
    "GapVerdict",
    "Grid",
    "GridConfig",
    "PDESolution",
    "Spacing",
    "add_defect_solution",
    "bc_from_name",
    "build_grid",
    "classify_gaps",
    "defect_profile",
    "grid_config_from_settings",
    "minimal_profile",
    "monte_carlo_profile",
    "pde_residual",
    "solve_cauchy",
    "uniqueness_gap_study",
]
