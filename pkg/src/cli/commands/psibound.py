"""cauchylab psibound -- Monte Carlo check of E[Psi(X_tau_n)] <= Psi(x) + x (T - t) / 2.

Failures are reported in the table and the JSON result; the exit code stays 0
unless the inputs are invalid.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from src.cli.artifacts import emit_json, envelope, write_json
from src.cli.display import render_psi_bound
from src.cli.runtime import guarded, mc_params, parse_list, resolve_seed, scenario_from, strict_repro
from src.models.volatility import parse_volatility
from src.sde.estimators import psi_bound_check
from src.sde.models import StoppingSpec


def psibound(
    ctx: typer.Context,
    sigma: Optional[str] = typer.Option(None, "--sigma", "-s", help="Volatility spec"),
    x: Optional[float] = typer.Option(None, "--x", help="Initial value x > 0"),
    t: Optional[float] = typer.Option(None, "--t", help="Initial time"),
    T: Optional[float] = typer.Option(None, "--T", help="Maturity"),
    levels: str = typer.Option("2,4,8,16", "--levels", "-l", help="Stopping levels n, comma separated"),
    paths: Optional[int] = typer.Option(None, "--paths", "-n", help="Number of paths"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Steps per unit time"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (required with --strict-repro)"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker threads"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario INI file"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write psibound.json here"),
) -> None:
    """Estimate Psi at the stopping times tau_n and compare with the Ito bound."""
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
        stopping = StoppingSpec(levels=tuple(parse_list(levels, int) or ()))
        report = psi_bound_check(model, scenario.x, scenario.t, scenario.T, stopping, mc_params(scenario, used_seed))
        payload = envelope("psibound", scenario, used_seed, report.model_dump(mode="json"))
        if out is not None:
            write_json(out / "psibound.json", payload)

    if as_json:
        emit_json(payload)
    else:
        render_psi_bound(report)
