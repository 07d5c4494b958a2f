"""cauchylab simulate -- Simulate the absorbed diffusion and dump X_T.

Usage:
    cauchylab simulate --sigma x --paths 10000 --seed 1 --out runs/gbm
    cauchylab simulate --sigma cev:p=2 --scheme inverse_bessel_exact --seed 3

Writes terminal.csv (one column, header x_T) and paths.json.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from src.cli.artifacts import emit_json, envelope, write_csv, write_json
from src.cli.display import console, render_batch
from src.cli.runtime import guarded, mc_params, resolve_seed, scenario_from, strict_repro
from src.models.volatility import parse_volatility
from src.sde.estimators import default_scheme
from src.sde.models import Scheme
from src.sde.simulator import simulate_paths


def simulate(
    ctx: typer.Context,
    sigma: Optional[str] = typer.Option(None, "--sigma", "-s", help="Volatility spec"),
    x: Optional[float] = typer.Option(None, "--x", help="Initial value x > 0"),
    t: Optional[float] = typer.Option(None, "--t", help="Initial time"),
    T: Optional[float] = typer.Option(None, "--T", help="Maturity"),
    paths: Optional[int] = typer.Option(None, "--paths", "-n", help="Number of paths"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Euler steps per unit time"),
    scheme: Optional[Scheme] = typer.Option(None, "--scheme", help="Default: exact when available, else Euler"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (required with --strict-repro)"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker threads"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario INI file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory (default: scenario output)"),
    as_json: bool = typer.Option(False, "--json", help="Print the batch summary as JSON"),
) -> None:
    """Simulate paths of dX = sigma(X) dW absorbed at 0."""
    with guarded():
        scenario = scenario_from(
            config,
            sigma=sigma,
            x=x,
            t=t,
            T=T,
            **{"mc.paths": paths, "mc.steps": steps, "mc.seed": seed, "mc.workers": workers},
        )
        used_seed = resolve_seed(scenario.mc.seed, strict_repro(ctx))
        scenario = scenario.with_overrides(**{"mc.seed": used_seed})
        model = parse_volatility(scenario.sigma)
        params = mc_params(scenario, used_seed)
        chosen = scheme or default_scheme(model)
        n_steps = 1 if chosen == Scheme.INVERSE_BESSEL_EXACT else params.steps_for(scenario.T - scenario.t)

        batch = simulate_paths(
            model,
            scenario.x,
            scenario.t,
            scenario.T,
            n_steps,
            params.n_paths,
            used_seed,
            scheme=chosen,
            workers=params.workers,
            block_size=params.block_size,
        )
        summary = batch.to_dict(include_values=False)
        summary["mean"] = float(np.mean(batch.terminal_values))
        payload = envelope("simulate", scenario, used_seed, summary)
        directory = out or Path(scenario.output.directory)
        if "csv" in scenario.output.formats:
            write_csv(directory / "terminal.csv", ["x_T"], ([v] for v in batch.terminal_values.tolist()))
        write_json(directory / "paths.json", payload)

    if as_json:
        emit_json(payload)
        return
    render_batch(model.describe(), batch)
    console.print(f"[muted]artifacts in {directory}[/muted]")
