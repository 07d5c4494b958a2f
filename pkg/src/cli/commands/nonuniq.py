"""cauchylab nonuniq -- Uniqueness gap between two far-field conditions.

Usage:
    cauchylab nonuniq --sigma x --payoff call:K=1
    cauchylab nonuniq --sigma cev:p=2 --payoff identity --ladder 8,16,32,64
    cauchylab nonuniq --sigma cev:p=2 --payoff put:K=1 --bc-b zero-gamma

The second condition defaults to the minimal-solution profile when a closed
form exists, and to zero-gamma otherwise.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from src.cli.artifacts import emit_json, envelope, write_csv, write_json
from src.cli.display import render_gap_report, warn
from src.cli.runtime import guarded, mc_params, models_from, parse_list, resolve_seed, scenario_from, strict_repro
from src.pde.boundary import bc_from_name
from src.pde.gap import uniqueness_gap_study
from src.pde.models import GridConfig, Spacing
from src.sde.closed_form import minimal_closed_form


def nonuniq(
    ctx: typer.Context,
    sigma: Optional[str] = typer.Option(None, "--sigma", "-s", help="Volatility spec"),
    payoff: Optional[str] = typer.Option(None, "--payoff", "-g", help="Payoff spec"),
    T: Optional[float] = typer.Option(None, "--T", help="Maturity"),
    ladder: Optional[str] = typer.Option(None, "--ladder", "-l", help="x_max rungs, e.g. 8,16,32"),
    reference: Optional[str] = typer.Option(None, "--x", help="Reference points, comma separated"),
    bc_a: Optional[str] = typer.Option(None, "--bc-a", help="First far-field condition (default: scenario bc)"),
    bc_b: Optional[str] = typer.Option(None, "--bc-b", help="Second far-field condition"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Time-stepping theta"),
    n_t: Optional[int] = typer.Option(None, "--n-t", help="Time steps per rung"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for mc-profile"),
    workers: int = typer.Option(4, "--workers", "-w", help="Rungs solved in parallel"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario INI file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory (default: scenario output)"),
    as_json: bool = typer.Option(False, "--json", help="Print the gap report as JSON"),
) -> None:
    """Compare two boundary treatments on a ladder of truncation points."""
    with guarded():
        scenario = scenario_from(
            config,
            sigma=sigma,
            payoff=payoff,
            T=T,
            **{
                "pde.ladder": parse_list(ladder),
                "pde.reference_xs": parse_list(reference),
                "pde.bc": bc_a,
                "pde.theta": theta,
                "pde.n_t": n_t,
                "mc.seed": seed,
            },
        )
        model, g = models_from(scenario)
        if bc_b is None:
            bc_b = "minimal-profile" if minimal_closed_form(model, g) is not None else "zero-gamma"

        names = (scenario.pde.bc, bc_b)
        params = None
        if any(name.replace("_", "-") == "mc-profile" for name in names):
            used_seed = resolve_seed(scenario.mc.seed, strict_repro(ctx))
            scenario = scenario.with_overrides(**{"mc.seed": used_seed})
            params = mc_params(scenario, used_seed)
        pair = (bc_from_name(names[0], model, g, params), bc_from_name(names[1], model, g, params))
        if pair[0].name() == pair[1].name():
            warn(f"both conditions are {pair[0].name()}; the gap is zero by construction")

        base = GridConfig(
            x_max=scenario.pde.ladder[0],
            n_x=scenario.pde.n_x,
            n_t=scenario.pde.n_t,
            T=scenario.T,
            t0=scenario.t,
            spacing=Spacing(scenario.pde.spacing.replace("-", "_")),
        )
        report = uniqueness_gap_study(
            model,
            g,
            pair,
            ladder=scenario.pde.ladder,
            reference_xs=scenario.pde.reference_xs,
            base=base,
            theta=scenario.pde.theta,
            workers=workers,
        )

        payload = envelope("nonuniq", scenario, scenario.mc.seed if params else None, report.model_dump(mode="json"))
        directory = out or Path(scenario.output.directory)
        if "csv" in scenario.output.formats:
            header, rows = report.csv_rows()
            write_csv(directory / "gaps.csv", header, rows)
        write_json(directory / "gap_report.json", payload)

    if as_json:
        emit_json(payload)
    else:
        render_gap_report(report)
