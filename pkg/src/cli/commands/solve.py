"""cauchylab solve -- Finite-difference solution of u_t + sigma^2 u_xx / 2 = 0.

Usage:
    cauchylab solve --sigma x --payoff call:K=1 --at 1
    cauchylab solve --config scenario.ini --bc minimal-profile
    cauchylab solve --sigma cev:p=2 --payoff identity --add-defect 1.5

Writes surface.csv (long format x, t, u) and solution.json into the output
directory and prints u at the probe points.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.cli.artifacts import emit_json, envelope, write_csv, write_json
from src.cli.display import console, format_float
from src.cli.runtime import guarded, mc_params, models_from, parse_list, resolve_seed, scenario_from, strict_repro
from src.pde.boundary import bc_from_name
from src.pde.defect import add_defect_solution, defect_profile
from src.pde.grid import build_grid
from src.pde.models import GridConfig, Spacing
from src.pde.residual import pde_residual
from src.pde.solver import solve_cauchy


def solve(
    ctx: typer.Context,
    sigma: Optional[str] = typer.Option(None, "--sigma", "-s", help="Volatility spec"),
    payoff: Optional[str] = typer.Option(None, "--payoff", "-g", help="Payoff spec, e.g. 'call:K=1', 'identity'"),
    t: Optional[float] = typer.Option(None, "--t", help="Initial time"),
    T: Optional[float] = typer.Option(None, "--T", help="Maturity"),
    x_max: Optional[float] = typer.Option(None, "--x-max", help="Truncation point of the x-domain"),
    n_x: Optional[int] = typer.Option(None, "--n-x", help="Space steps"),
    n_t: Optional[int] = typer.Option(None, "--n-t", help="Time steps"),
    theta: Optional[float] = typer.Option(None, "--theta", help="1 = implicit, 0.5 = Crank-Nicolson"),
    bc: Optional[str] = typer.Option(None, "--bc", help="dirichlet-payoff | zero-gamma | minimal-profile | mc-profile"),
    spacing: Optional[str] = typer.Option(None, "--spacing", help="uniform | log-uniform"),
    at: Optional[str] = typer.Option(None, "--at", help="Probe points, comma separated (default: scenario x)"),
    add_defect: Optional[float] = typer.Option(None, "--add-defect", help="Report u + lambda u* for this lambda"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for mc-profile and Monte Carlo defects"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario INI file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory (default: scenario output)"),
    as_json: bool = typer.Option(False, "--json", help="Print metadata and probe values as JSON"),
) -> None:
    """Solve the Cauchy problem backward from T and print u(x, t)."""
    with guarded():
        scenario = scenario_from(
            config,
            sigma=sigma,
            payoff=payoff,
            t=t,
            T=T,
            **{
                "pde.x_max": x_max,
                "pde.n_x": n_x,
                "pde.n_t": n_t,
                "pde.theta": theta,
                "pde.bc": bc,
                "pde.spacing": spacing,
                "mc.seed": seed,
            },
        )
        model, g = models_from(scenario)
        needs_mc = scenario.pde.bc.replace("_", "-") == "mc-profile" or add_defect is not None
        params = None
        if needs_mc:
            used_seed = resolve_seed(scenario.mc.seed, strict_repro(ctx))
            scenario = scenario.with_overrides(**{"mc.seed": used_seed})
            params = mc_params(scenario, used_seed)

        grid = build_grid(
            GridConfig(
                x_max=scenario.pde.x_max,
                n_x=scenario.pde.n_x,
                n_t=scenario.pde.n_t,
                T=scenario.T,
                t0=scenario.t,
                spacing=Spacing(scenario.pde.spacing.replace("-", "_")),
            )
        )
        condition = bc_from_name(scenario.pde.bc, model, g, params)
        solution = solve_cauchy(model, g, grid, condition, scenario.pde.theta)
        if add_defect is not None:
            solution = add_defect_solution(solution, defect_profile(model, grid, params=params), add_defect)

        probes = parse_list(at) or [scenario.x]
        outside = [p for p in probes if not 0.0 <= p <= grid.x_max]
        if outside:
            raise ValueError(f"probe points {outside} lie outside [0, {grid.x_max:g}]")
        values = [float(solution.value_at(p)) for p in probes]
        residual = pde_residual(solution, model)

        result = {
            **solution.metadata_dict(),
            "residual": residual,
            "probes": [{"x": p, "t": scenario.t, "u": v} for p, v in zip(probes, values)],
        }
        payload = envelope("solve", scenario, scenario.mc.seed if needs_mc else None, result)
        directory = out or Path(scenario.output.directory)
        if "csv" in scenario.output.formats:
            header, rows = solution.csv_rows()
            write_csv(directory / "surface.csv", header, rows)
        write_json(directory / "solution.json", payload)

    if as_json:
        emit_json(payload)
        return
    table = Table(title=f"u(x, {scenario.t:g})  ({condition.name()}, theta={solution.theta:g})", pad_edge=True)
    table.add_column("x", justify="right")
    table.add_column("u", justify="right")
    for p, v in zip(probes, values):
        table.add_row(f"{p:g}", format_float(v, 4))
    console.print(table)
    console.print(f"[muted]max residual {residual:.2e}; artifacts in {directory}[/muted]")
