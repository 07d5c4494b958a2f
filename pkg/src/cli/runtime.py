"""Exit codes, error mapping and seed policy shared by the commands."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

import numpy as np
import typer
from pydantic import ValidationError

from src.cli.display import error, warn
from src.cli.scenario import ScenarioConfig, load_scenario
from src.condition.models import Verdict
from src.errors import LabError
from src.models.payoff import PayoffSpec, parse_payoff
from src.models.volatility import VolatilityModel, parse_volatility
from src.sde.models import MonteCarloParams

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_STRICT = 2
EXIT_INCONCLUSIVE = 3

VERDICT_EXIT = {
    Verdict.MARTINGALE: EXIT_OK,
    Verdict.STRICT_LOCAL_MARTINGALE: EXIT_STRICT,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


@contextmanager
def guarded() -> Iterator[None]:
    """Turn domain, validation and I/O errors into exit code 1 with a message on stderr."""
    try:
        yield
    except ValidationError as exc:
        error(f"invalid input: {exc}")
        raise typer.Exit(EXIT_ERROR) from None
    except (LabError, ValueError, OSError) as exc:
        error(str(exc))
        raise typer.Exit(EXIT_ERROR) from None


def strict_repro(ctx: typer.Context) -> bool:
    return bool(ctx.obj and ctx.obj.get("strict_repro"))


def resolve_seed(seed: int | None, strict: bool) -> int:
    """The given seed, or a fresh 128-bit one (reported) outside strict mode."""
    if seed is not None:
        return seed
    if strict:
        raise ValueError("--strict-repro requires an explicit --seed (or mc.seed in the scenario)")
    fresh = int(np.random.SeedSequence().entropy)
    warn(f"no seed given; using seed {fresh}")
    return fresh


def scenario_from(config: Path | None, **overrides: object) -> ScenarioConfig:
    return load_scenario(config).with_overrides(**overrides)


def models_from(scenario: ScenarioConfig, with_payoff: bool = True) -> tuple[VolatilityModel, PayoffSpec | None]:
    model = parse_volatility(scenario.sigma)
    payoff = parse_payoff(scenario.payoff) if with_payoff else None
    return model, payoff


def mc_params(scenario: ScenarioConfig, seed: int, n_steps: int | None = None) -> MonteCarloParams:
    return MonteCarloParams.from_config(
        seed,
        n_paths=scenario.mc.paths,
        steps_per_unit_time=scenario.mc.steps,
        workers=scenario.mc.workers,
        n_steps=n_steps,
    )


def parse_list(text: str | None, cast: type = float) -> list | None:
    """'8,16,32' -> [8.0, 16.0, 32.0]; None stays None."""
    if text is None:
        return None
    try:
        return [cast(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ValueError(f"not a comma-separated list of numbers: {text!r}") from None
